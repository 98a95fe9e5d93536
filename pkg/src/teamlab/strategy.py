"""Pure, mixed and independently randomized team policies and their strategic measures.

A strategic measure here is a :class:`JointDistribution` with axes
``state, y_1..y_n, u_1..u_n`` (all measurements before all actions). Its
marginal on ``state, y_1..y_n`` is always the team marginal it was built from.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .prob_core import FiniteSpace, JointDistribution, NormalizationError, ShapeError

DEFAULT_CAP = 10**6
WEIGHT_TOL = 1e-12


class CapExceededError(RuntimeError):
    """An enumeration would exceed its configured size cap."""

    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: {count} items exceeds cap {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class PureTeamPolicy:
    """One lookup table per player, ``tables[k][y] = u``."""

    tables: tuple[tuple[int, ...], ...]
    act_sizes: tuple[int, ...]

    def __post_init__(self):
        tables = tuple(tuple(int(u) for u in t) for t in self.tables)
        act = tuple(int(a) for a in self.act_sizes)
        if len(tables) != len(act):
            raise ShapeError("one table per player")
        for t, a in zip(tables, act):
            if any(u < 0 or u >= a for u in t):
                raise ShapeError(f"table {t} has actions outside range({a})")
        object.__setattr__(self, "tables", tables)
        object.__setattr__(self, "act_sizes", act)

    @property
    def meas_sizes(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.tables)

    def joint_table(self) -> np.ndarray:
        """Joint action index for every joint measurement index (both row-major)."""
        grids = np.indices(self.meas_sizes).reshape(len(self.tables), -1)
        acts = [np.asarray(t)[g] for t, g in zip(self.tables, grids)]
        return np.ravel_multi_index(acts, self.act_sizes).astype(np.int64)

    @classmethod
    def constant(cls, meas_sizes, act_sizes, action=0) -> "PureTeamPolicy":
        return cls(tuple((action,) * m for m in meas_sizes), tuple(act_sizes))

    @classmethod
    def identity(cls, meas_sizes) -> "PureTeamPolicy":
        return cls(tuple(tuple(range(m)) for m in meas_sizes), tuple(meas_sizes))


@dataclass(frozen=True)
class MixedTeamStrategy:
    support: tuple[PureTeamPolicy, ...]
    weights: np.ndarray

    def __post_init__(self):
        support = tuple(self.support)
        w = np.asarray(self.weights, dtype=float)
        if len(support) != len(w) or not support:
            raise ShapeError("one weight per support policy")
        if (w < 0).any() or abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise NormalizationError(f"mixture weights are not a probability vector (sum {w.sum()!r})")
        if len(set(support)) != len(support):
            raise ValueError("support policies must be distinct")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", w)

    @classmethod
    def pure(cls, p: PureTeamPolicy) -> "MixedTeamStrategy":
        return cls((p,), np.ones(1))

    @classmethod
    def from_dense(cls, policies: Sequence[PureTeamPolicy], weights, drop: float = 0.0) -> "MixedTeamStrategy":
        """Keep policies with weight above ``drop`` (LP output is clipped at zero first)."""
        w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        keep = np.flatnonzero(w > drop)
        w = w[keep]
        return cls(tuple(policies[i] for i in keep), w / w.sum())

    def as_dict(self) -> dict:
        """Sparse form: support index within the strategy -> weight."""
        return {str(i): float(w) for i, w in enumerate(self.weights)}


@dataclass(frozen=True)
class ProductRandomizedPolicy:
    """Independent per-player kernels ``kernels[k][y, u]``."""

    kernels: tuple

    def __post_init__(self):
        ks = tuple(np.array(k, dtype=float) for k in self.kernels)
        for k in ks:
            if k.ndim != 2 or (k < 0).any() or np.abs(k.sum(axis=1) - 1.0).max() > WEIGHT_TOL:
                raise NormalizationError("every kernel row must be a probability vector")
            k.setflags(write=False)
        object.__setattr__(self, "kernels", ks)

    @property
    def act_sizes(self) -> tuple[int, ...]:
        return tuple(k.shape[1] for k in self.kernels)


def count_policies(meas_sizes, act_sizes) -> int:
    n = 1
    for y, u in zip(meas_sizes, act_sizes):
        n *= int(u) ** int(y)
    return n


def policy_tables(meas_sizes, act_sizes, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Joint tables of every pure team policy, lexicographic order, shape ``(n, prod(meas))``."""
    n = count_policies(meas_sizes, act_sizes)
    if n > cap:
        raise CapExceededError("pure team policies", n, cap)
    if len(meas_sizes) == 0:
        return np.zeros((1, 1), dtype=np.int64)
    per_player = [
        np.indices((u,) * y).reshape(y, -1).T if y > 0 else np.zeros((1, 0), dtype=int)
        for y, u in zip(meas_sizes, act_sizes)
    ]
    # a player's table with y entries over a u-ary alphabet; first entry varies slowest
    idx = np.indices(tuple(len(p) for p in per_player)).reshape(len(per_player), -1)
    grids = np.indices(tuple(meas_sizes)).reshape(len(meas_sizes), -1)
    acts = [per_player[k][idx[k]][:, grids[k]] for k in range(len(per_player))]
    return np.ravel_multi_index(acts, tuple(act_sizes)).astype(np.int64)


def enumerate_pure_team_policies(split, team: int, cap: int = DEFAULT_CAP) -> list[PureTeamPolicy]:
    return enumerate_policies(split.meas_sizes(team), split.act_sizes(team), cap)


def enumerate_policies(meas_sizes, act_sizes, cap: int = DEFAULT_CAP) -> list[PureTeamPolicy]:
    n = count_policies(meas_sizes, act_sizes)
    if n > cap:
        raise CapExceededError("pure team policies", n, cap)
    per_player = [list(itertools.product(range(u), repeat=y)) for y, u in zip(meas_sizes, act_sizes)]
    return [PureTeamPolicy(tabs, tuple(act_sizes)) for tabs in itertools.product(*per_player)]


def _team_axes(mu_team: JointDistribution) -> tuple[list[FiniteSpace], list[str]]:
    meas = list(mu_team.axes[1:])
    return meas, ["u" + a.name[1:] if a.name.startswith("y") else f"u_{a.name}" for a in meas]


def _check(mu_team: JointDistribution, meas_sizes) -> None:
    if tuple(mu_team.shape[1:]) != tuple(meas_sizes):
        raise ShapeError(f"policy measurement sizes {tuple(meas_sizes)} vs team marginal {mu_team.shape[1:]}")


def _assemble(mu_team: JointDistribution, act_sizes, conditional: np.ndarray) -> JointDistribution:
    """``out[x, y, u] = mu[x, y] * conditional[y, u]`` with joint y and u indices."""
    meas, act_names = _team_axes(mu_team)
    nx = mu_team.shape[0]
    mu2 = mu_team.tensor.reshape(nx, -1)
    out = mu2[:, :, None] * conditional[None, :, :]
    axes = [mu_team.axes[0]] + meas + [FiniteSpace(n, s) for n, s in zip(act_names, act_sizes)]
    return JointDistribution(axes, out, check=False)


def strategic_measure(mu_team: JointDistribution, p: PureTeamPolicy) -> JointDistribution:
    _check(mu_team, p.meas_sizes)
    table = p.joint_table()
    cond = np.zeros((len(table), int(np.prod(p.act_sizes))))
    cond[np.arange(len(table)), table] = 1.0
    return _assemble(mu_team, p.act_sizes, cond)


def mixture_measure(mu_team: JointDistribution, m: MixedTeamStrategy) -> JointDistribution:
    first = m.support[0]
    _check(mu_team, first.meas_sizes)
    n_y = int(np.prod(first.meas_sizes))
    cond = np.zeros((n_y, int(np.prod(first.act_sizes))))
    for p, w in zip(m.support, m.weights):
        cond[np.arange(n_y), p.joint_table()] += w
    return _assemble(mu_team, first.act_sizes, cond)


def product_conditional(kernels: Sequence[np.ndarray]) -> np.ndarray:
    """Joint conditional ``P(u | y)`` of independent per-player kernels, joint indices row-major."""
    cond = np.ones((1, 1))
    for k in kernels:
        cond = np.einsum("ab,cd->acbd", cond, k).reshape(cond.shape[0] * k.shape[0], cond.shape[1] * k.shape[1])
    return cond


def product_randomized_measure(mu_team: JointDistribution, r: ProductRandomizedPolicy) -> JointDistribution:
    _check(mu_team, tuple(k.shape[0] for k in r.kernels))
    return _assemble(mu_team, r.act_sizes, product_conditional(r.kernels))


def peel_kernel(rows: np.ndarray, tol: float = 0.0) -> tuple[list[tuple[int, ...]], list[float]]:
    """Write a row-stochastic matrix as a mixture of deterministic tables.

    Each step takes, in every row, the lowest-index atom with residual mass
    above ``tol``, assigns the smallest such mass to that table, and subtracts
    it. At least one entry is exhausted per step.
    """
    rem = np.array(rows, dtype=float)
    tables, weights = [], []
    total = 0.0
    while total < 1.0:
        picks = []
        for r in rem:
            nz = np.flatnonzero(r > tol)
            if nz.size == 0:
                break
            picks.append(int(nz[0]))
        if len(picks) < rem.shape[0]:
            break
        rows_idx = np.arange(rem.shape[0])
        w = float(rem[rows_idx, picks].min())
        rem[rows_idx, picks] -= w
        rem[rows_idx, picks] = np.where(rem[rows_idx, picks] < 0, 0.0, rem[rows_idx, picks])
        tables.append(tuple(picks))
        weights.append(w)
        total += w
    return tables, weights


def ccr_to_mixture(mu_team: JointDistribution, kernels_by_atom: Sequence[Sequence[np.ndarray]], eta,
                   cap: int = DEFAULT_CAP) -> MixedTeamStrategy:
    """Rewrite common-randomness kernels as a mixture of pure team policies.

    ``kernels_by_atom[z][k]`` is player ``k``'s kernel (measurement by action)
    under common-randomness atom ``z``, drawn with probability ``eta[z]``.
    For each atom the product kernel splits into a product of per-player
    deterministic-table mixtures; equal policies are merged and the support
    is sorted lexicographically.
    """
    eta = np.asarray(eta, dtype=float)
    if len(eta) != len(kernels_by_atom):
        raise ShapeError("one weight per common-randomness atom")
    acc: dict[PureTeamPolicy, float] = {}
    for z_w, ks in zip(eta, kernels_by_atom):
        ks = [np.asarray(k, dtype=float) for k in ks]
        _check(mu_team, tuple(k.shape[0] for k in ks))
        act = tuple(k.shape[1] for k in ks)
        pieces = [peel_kernel(k) for k in ks]
        n = int(np.prod([len(t) for t, _ in pieces]))
        if n > cap:
            raise CapExceededError("kernel decomposition", n, cap)
        for combo in itertools.product(*[list(zip(t, w)) for t, w in pieces]):
            p = PureTeamPolicy(tuple(c[0] for c in combo), act)
            acc[p] = acc.get(p, 0.0) + z_w * float(np.prod([c[1] for c in combo]))
    support = sorted(acc, key=lambda p: p.tables)
    w = np.array([acc[p] for p in support])
    return MixedTeamStrategy(tuple(support), w / w.sum())


def ccr_measure(mu_team: JointDistribution, kernels_by_atom, eta) -> JointDistribution:
    """Direct common-randomness measure ``sum_z eta[z] * prod_k kernel_k(u_k | y_k, z)``."""
    eta = np.asarray(eta, dtype=float)
    cond = sum(w * product_conditional([np.asarray(k, dtype=float) for k in ks]) for w, ks in zip(eta, kernels_by_atom))
    act = tuple(np.asarray(k).shape[1] for k in kernels_by_atom[0])
    return _assemble(mu_team, act, cond)
