"""Labeled finite probability tensors and kernels.

A :class:`JointDistribution` is a nonnegative array over the product of a
list of named :class:`FiniteSpace` axes. Axis order is significant: the flat
``weights`` view is row-major in that order, and nothing here reorders axes
implicitly.

Total variation is the plain L1 sum ``sum |p - q|`` so that
``|<c, p> - <c, q>| <= max|c| * tv_distance(p, q)`` holds with constant one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MASS_TOL = 1e-12


class ShapeError(ValueError):
    """Axes or array shapes do not line up."""


class NormalizationError(ValueError):
    """A distribution or kernel row does not sum to one within tolerance."""


@dataclass(frozen=True)
class FiniteSpace:
    name: str
    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ShapeError(f"space {self.name!r} needs a positive integer size, got {self.size!r}")


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


class JointDistribution:
    """Probability tensor over labeled finite axes.

    Parameters
    ----------
    axes : sequence of FiniteSpace
        Names must be unique.
    weights : array_like
        Either already shaped like the product space or flat (row-major).
    check : bool
        Raise :class:`NormalizationError` if :func:`validate` reports anything.
    """

    __slots__ = ("axes", "_w")

    def __init__(self, axes: Sequence[FiniteSpace], weights, check: bool = True):
        axes = tuple(axes)
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ShapeError(f"duplicate axis names {names}")
        shape = tuple(a.size for a in axes)
        w = np.asarray(weights, dtype=float)
        if w.size != int(np.prod(shape, dtype=np.int64)):
            raise ShapeError(f"{w.size} weights for product space of shape {shape}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "_w", _frozen(w.reshape(shape)))
        if check:
            problems = validate(self)
            if problems:
                raise NormalizationError("; ".join(problems))

    def __setattr__(self, key, value):
        raise AttributeError("JointDistribution is immutable")

    @property
    def tensor(self) -> np.ndarray:
        return self._w

    @property
    def weights(self) -> np.ndarray:
        return self._w.reshape(-1)

    @property
    def shape(self) -> tuple[int, ...]:
        return self._w.shape

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    def axis_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ShapeError(f"axis {name!r} not in {self.names}") from None

    def same_axes(self, other: "JointDistribution") -> bool:
        return self.axes == other.axes

    def __repr__(self):
        dims = " x ".join(f"{a.name}[{a.size}]" for a in self.axes)
        return f"JointDistribution({dims})"

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self.axes == other.axes and np.array_equal(self._w, other._w)

    __hash__ = None


class Kernel:
    """Row-stochastic matrix from ``src`` atoms to ``dst`` atoms."""

    __slots__ = ("src", "dst", "_rows")

    def __init__(self, src: FiniteSpace, dst: FiniteSpace, rows, check: bool = True):
        rows = np.asarray(rows, dtype=float)
        if rows.shape != (src.size, dst.size):
            raise ShapeError(f"kernel rows have shape {rows.shape}, expected {(src.size, dst.size)}")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "_rows", _frozen(rows))
        if check:
            if (rows < 0).any():
                raise NormalizationError("kernel has negative entries")
            err = np.abs(rows.sum(axis=1) - 1.0).max()
            if err > MASS_TOL:
                raise NormalizationError(f"kernel row mass error {err!r}")

    def __setattr__(self, key, value):
        raise AttributeError("Kernel is immutable")

    @property
    def rows(self) -> np.ndarray:
        return self._rows

    @classmethod
    def identity(cls, space: FiniteSpace) -> "Kernel":
        return cls(space, space, np.eye(space.size))

    @classmethod
    def deterministic(cls, src: FiniteSpace, dst: FiniteSpace, table) -> "Kernel":
        table = np.asarray(table, dtype=int)
        rows = np.zeros((src.size, dst.size))
        rows[np.arange(src.size), table] = 1.0
        return cls(src, dst, rows)

    def then(self, other: "Kernel") -> "Kernel":
        """Composite kernel: apply ``self`` first, then ``other``."""
        if other.src.size != self.dst.size:
            raise ShapeError("kernel composition size mismatch")
        return Kernel(self.src, other.dst, self._rows @ other._rows, check=False)


def validate(d: JointDistribution) -> list[str]:
    """Return the list of violated invariants (empty when ``d`` is valid)."""
    problems = []
    w = d.tensor
    if not np.all(np.isfinite(w)):
        problems.append("non-finite weights")
        return problems
    if (w < 0).any():
        problems.append(f"negative weights (min {w.min()!r})")
    err = float(w.sum()) - 1.0
    if abs(err) > MASS_TOL:
        problems.append(f"mass error {abs(err)!r}")
    return problems


def mass_error(d: JointDistribution) -> float:
    return abs(float(d.tensor.sum()) - 1.0)


def tv_distance(p: JointDistribution, q: JointDistribution) -> float:
    if not p.same_axes(q):
        raise ShapeError(f"axis mismatch: {p.names} vs {q.names}")
    return float(np.abs(p.tensor - q.tensor).sum())


def marginalize(d: JointDistribution, keep: Sequence[str]) -> JointDistribution:
    """Sum out every axis not named in ``keep``; kept axes stay in their original order."""
    keep = list(keep)
    if not keep:
        raise ShapeError("marginalize needs at least one axis to keep")
    idx = sorted(d.axis_index(n) for n in keep)
    if len(set(idx)) != len(idx):
        raise ShapeError(f"repeated axis in {keep}")
    drop = tuple(i for i in range(len(d.axes)) if i not in idx)
    w = d.tensor.sum(axis=drop) if drop else d.tensor
    return JointDistribution([d.axes[i] for i in idx], w, check=False)


def product(*ds: JointDistribution) -> JointDistribution:
    axes = [a for d in ds for a in d.axes]
    w = ds[0].tensor
    for d in ds[1:]:
        w = np.multiply.outer(w, d.tensor)
    return JointDistribution(axes, w, check=False)


def point_mass(space: FiniteSpace, atom: int = 0) -> JointDistribution:
    w = np.zeros(space.size)
    w[atom] = 1.0
    return JointDistribution([space], w)


def uniform(axes: Sequence[FiniteSpace]) -> JointDistribution:
    shape = tuple(a.size for a in axes)
    n = int(np.prod(shape))
    return JointDistribution(axes, np.full(shape, 1.0 / n))


def compose_prior_channel(prior: JointDistribution, channel: Kernel) -> JointDistribution:
    """Joint of ``(x, y)`` with ``x ~ prior`` and ``y ~ channel(. | x)``."""
    if len(prior.axes) != 1 or prior.axes[0].size != channel.src.size:
        raise ShapeError("channel input does not match the prior's single axis")
    w = prior.tensor[:, None] * channel.rows
    return JointDistribution([prior.axes[0], channel.dst], w, check=False)


def push_through_kernel(d: JointDistribution, axis: str, k: Kernel) -> JointDistribution:
    """Replace ``axis`` by the output of ``k``; every other coordinate is untouched.

    The replaced axis keeps its name and takes the kernel's output size.
    """
    i = d.axis_index(axis)
    if d.axes[i].size != k.src.size:
        raise ShapeError(f"kernel input size {k.src.size} != axis {axis!r} size {d.axes[i].size}")
    w = np.moveaxis(np.tensordot(d.tensor, k.rows, axes=([i], [0])), -1, i)
    axes = list(d.axes)
    axes[i] = FiniteSpace(axis, k.dst.size)
    return JointDistribution(axes, w, check=False)


def mixture(ds: Sequence[JointDistribution], weights) -> JointDistribution:
    weights = np.asarray(weights, dtype=float)
    if len(ds) != len(weights) or len(ds) == 0:
        raise ShapeError("need one weight per distribution")
    for d in ds[1:]:
        if not d.same_axes(ds[0]):
            raise ShapeError("mixture components have different axes")
    w = np.tensordot(weights, np.stack([d.tensor for d in ds]), axes=1)
    return JointDistribution(ds[0].axes, w, check=False)


def expectation(c: np.ndarray, d: JointDistribution) -> float:
    c = np.asarray(c, dtype=float)
    if c.shape != d.shape:
        raise ShapeError(f"cost shape {c.shape} vs distribution shape {d.shape}")
    return float((c * d.tensor).sum())
