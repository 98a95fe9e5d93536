"""Information structures for two teams, correlated garblings, and generators.

Axis order of :attr:`InformationStructure.joint` is fixed: ``state`` first,
then Team 1 measurement axes ``y1_1, y1_2, ...``, then Team 2 measurement
axes ``y2_1, ...``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .prob_core import (
    FiniteSpace,
    JointDistribution,
    NormalizationError,
    ShapeError,
    marginalize,
    validate,
)

PRIOR_TOL = 1e-12
LOAD_MASS_TOL = 1e-9
STATE = "state"


def meas_name(team: int, player: int) -> str:
    return f"y{team}_{player + 1}"


def action_name(team: int, player: int) -> str:
    return f"u{team}_{player + 1}"


@dataclass(frozen=True)
class TeamSplit:
    """Per-player measurement and action sizes for Team 1 and Team 2.

    ``team2_meas == ()`` is the degenerate pure team problem.
    """

    team1_meas: tuple[int, ...]
    team1_act: tuple[int, ...]
    team2_meas: tuple[int, ...] = ()
    team2_act: tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("team1_meas", "team1_act", "team2_meas", "team2_act"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        if len(self.team1_meas) < 1:
            raise ShapeError("Team 1 needs at least one player")
        if len(self.team1_meas) != len(self.team1_act) or len(self.team2_meas) != len(self.team2_act):
            raise ShapeError("one measurement size and one action size per player")
        if any(v < 1 for v in self.team1_meas + self.team1_act + self.team2_meas + self.team2_act):
            raise ShapeError("space sizes must be >= 1")

    def n_players(self, team: int) -> int:
        return len(self.meas_sizes(team))

    def meas_sizes(self, team: int) -> tuple[int, ...]:
        return {1: self.team1_meas, 2: self.team2_meas}[_team(team)]

    def act_sizes(self, team: int) -> tuple[int, ...]:
        return {1: self.team1_act, 2: self.team2_act}[_team(team)]

    def meas_axes(self, team: int) -> list[FiniteSpace]:
        return [FiniteSpace(meas_name(team, i), s) for i, s in enumerate(self.meas_sizes(team))]

    def act_axes(self, team: int) -> list[FiniteSpace]:
        return [FiniteSpace(action_name(team, i), s) for i, s in enumerate(self.act_sizes(team))]

    def with_actions_equal_measurements(self) -> "TeamSplit":
        return TeamSplit(self.team1_meas, self.team1_meas, self.team2_meas, self.team2_meas)

    @classmethod
    def symmetric(cls, players1: int, players2: int, meas: int, act: int) -> "TeamSplit":
        return cls((meas,) * players1, (act,) * players1, (meas,) * players2, (act,) * players2)


def _team(team) -> int:
    if team not in (1, 2):
        raise ValueError(f"team must be 1 or 2, got {team!r}")
    return team


class InformationStructure:
    """Prior on the state plus the joint law of state and every measurement."""

    __slots__ = ("split", "joint")

    def __init__(self, split: TeamSplit, joint: JointDistribution):
        expected = (STATE,) + tuple(a.name for a in split.meas_axes(1) + split.meas_axes(2))
        if joint.names != expected or joint.shape[1:] != split.team1_meas + split.team2_meas:
            raise ShapeError(f"joint axes {joint.names}{joint.shape} do not match split {expected}")
        problems = validate(joint)
        if problems:
            raise NormalizationError("; ".join(problems))
        object.__setattr__(self, "split", split)
        object.__setattr__(self, "joint", joint)

    def __setattr__(self, key, value):
        raise AttributeError("InformationStructure is immutable")

    @property
    def state_space(self) -> FiniteSpace:
        return self.joint.axes[0]

    @property
    def state_size(self) -> int:
        return self.joint.shape[0]

    @property
    def prior(self) -> np.ndarray:
        t = self.joint.tensor
        return t.reshape(t.shape[0], -1).sum(axis=1)

    def axis_names(self, team) -> list[str]:
        if team == "both":
            return self.axis_names(1) + self.axis_names(2)
        return [a.name for a in self.split.meas_axes(team)]

    def same_frame(self, other: "InformationStructure", tol: float = 1e-9) -> bool:
        return (
            self.split.team1_meas == other.split.team1_meas
            and self.split.team2_meas == other.split.team2_meas
            and self.state_size == other.state_size
            and float(np.abs(self.prior - other.prior).sum()) <= tol
        )

    def __repr__(self):
        return f"InformationStructure(state={self.state_size}, split={self.split})"


def team_marginal(mu: InformationStructure, team: int) -> JointDistribution:
    """Marginal on the state and that team's measurement axes."""
    return marginalize(mu.joint, [STATE] + mu.axis_names(_team(team)))


# ---------------------------------------------------------------------------
# garbling


def joint_tables(tables: Sequence[np.ndarray], in_sizes: Sequence[int], out_sizes: Sequence[int]) -> np.ndarray:
    """Collapse per-player maps into one map on row-major joint indices."""
    grids = np.indices(tuple(in_sizes)).reshape(len(in_sizes), -1)
    outs = [np.asarray(t, dtype=np.int64)[g] for t, g in zip(tables, grids)]
    if not outs:
        return np.zeros(1, dtype=np.int64)
    return np.ravel_multi_index(outs, tuple(out_sizes)).astype(np.int64)


def push_axes(tensor: np.ndarray, axis_idx: Sequence[int], joint_maps: np.ndarray, out_sizes: Sequence[int]) -> np.ndarray:
    """Push a tensor through a batch of deterministic maps acting jointly on ``axis_idx``.

    ``joint_maps`` has shape ``(n_maps, prod(in sizes))``; the result has shape
    ``(n_maps, *tensor.shape with the selected axes resized)``.
    """
    axis_idx = list(axis_idx)
    nd = tensor.ndim
    rest = [i for i in range(nd) if i not in axis_idx]
    moved = np.transpose(tensor, rest + axis_idx)
    rest_shape = [tensor.shape[i] for i in rest]
    n_in = int(np.prod([tensor.shape[i] for i in axis_idx], dtype=np.int64))
    n_out = int(np.prod(out_sizes, dtype=np.int64))
    flat = moved.reshape(int(np.prod(rest_shape, dtype=np.int64)), n_in)
    pushed = kernels.pushforward(flat, np.atleast_2d(joint_maps), n_out)
    pushed = pushed.reshape([pushed.shape[0]] + rest_shape + list(out_sizes))
    # undo the transpose (axis 0 is the batch)
    order = rest + axis_idx
    inverse = np.argsort(order)
    return np.transpose(pushed, [0] + [1 + int(i) for i in inverse])


@dataclass(frozen=True)
class CorrelatedGarbling:
    """Mixture over common-randomness atoms of tuples of deterministic maps.

    ``tables[z][k]`` maps player ``k``'s input atoms to output atoms under
    atom ``z``; ``weights[z]`` is the probability of that atom.
    """

    tables: tuple
    weights: np.ndarray
    in_sizes: tuple[int, ...]
    out_sizes: tuple[int, ...] = None

    def __post_init__(self):
        in_sizes = tuple(int(s) for s in self.in_sizes)
        out_sizes = in_sizes if self.out_sizes is None else tuple(int(s) for s in self.out_sizes)
        tables = tuple(tuple(np.asarray(t, dtype=np.int64) for t in atom) for atom in self.tables)
        w = np.asarray(self.weights, dtype=float)
        if len(tables) != len(w) or len(w) == 0:
            raise ShapeError("one weight per common-randomness atom")
        if (w < 0).any() or abs(w.sum() - 1.0) > PRIOR_TOL:
            raise NormalizationError(f"garbling weights are not a probability vector (sum {w.sum()!r})")
        for atom in tables:
            if len(atom) != len(in_sizes):
                raise ShapeError("one map per player in every atom")
            for t, n_in, n_out in zip(atom, in_sizes, out_sizes):
                if t.shape != (n_in,) or (t < 0).any() or (t >= n_out).any():
                    raise ShapeError(f"map {t.tolist()} is not a table {n_in} -> {n_out}")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "tables", tables)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "in_sizes", in_sizes)
        object.__setattr__(self, "out_sizes", out_sizes)

    @property
    def n_players(self) -> int:
        return len(self.in_sizes)

    def joint_maps(self) -> np.ndarray:
        return np.stack([joint_tables(atom, self.in_sizes, self.out_sizes) for atom in self.tables])

    @classmethod
    def identity(cls, sizes: Sequence[int]) -> "CorrelatedGarbling":
        return cls(((tuple(np.arange(s) for s in sizes)),), np.ones(1), tuple(sizes))

    def then(self, other: "CorrelatedGarbling") -> "CorrelatedGarbling":
        """Apply ``self`` then ``other``; atoms range over the product of both atom sets."""
        if other.in_sizes != self.out_sizes:
            raise ShapeError("garbling composition size mismatch")
        tables, weights = [], []
        for a, wa in zip(self.tables, self.weights):
            for b, wb in zip(other.tables, other.weights):
                tables.append(tuple(tb[ta] for ta, tb in zip(a, b)))
                weights.append(wa * wb)
        return CorrelatedGarbling(tuple(tables), np.array(weights), self.in_sizes, other.out_sizes)


def apply_correlated_garbling(mu: InformationStructure, g: CorrelatedGarbling, team=1) -> InformationStructure:
    """Garble the selected team's measurements (``team`` is 1, 2 or ``"both"``)."""
    names = mu.axis_names(team)
    if g.n_players != len(names):
        raise ShapeError(f"garbling has {g.n_players} players, team {team!r} has {len(names)}")
    idx = [mu.joint.axis_index(n) for n in names]
    if tuple(mu.joint.shape[i] for i in idx) != g.in_sizes:
        raise ShapeError(f"garbling input sizes {g.in_sizes} do not match {names}")
    pushed = push_axes(mu.joint.tensor, idx, g.joint_maps(), g.out_sizes)
    w = np.tensordot(g.weights, pushed, axes=1)
    split = _resized_split(mu.split, team, g.out_sizes)
    axes = [mu.state_space] + split.meas_axes(1) + split.meas_axes(2)
    return InformationStructure(split, JointDistribution(axes, w, check=False))


def _resized_split(split: TeamSplit, team, out_sizes) -> TeamSplit:
    out_sizes = tuple(out_sizes)
    n1 = split.n_players(1)
    if team == 1:
        t1, t2 = out_sizes, split.team2_meas
    elif team == 2:
        t1, t2 = split.team1_meas, out_sizes
    else:
        t1, t2 = out_sizes[:n1], out_sizes[n1:]
    return TeamSplit(t1, split.team1_act, t2, split.team2_act)


def random_garbling(rng: np.random.Generator, sizes: Sequence[int], n_atoms: int = 3, out_sizes=None) -> CorrelatedGarbling:
    out_sizes = tuple(sizes) if out_sizes is None else tuple(out_sizes)
    tables = tuple(
        tuple(rng.integers(0, o, size=s) for s, o in zip(sizes, out_sizes)) for _ in range(n_atoms)
    )
    w = rng.exponential(size=n_atoms)
    return CorrelatedGarbling(tables, w / w.sum(), tuple(sizes), out_sizes)


# ---------------------------------------------------------------------------
# constructors and generators


def _draw_simplex(rng: np.random.Generator, shape) -> np.ndarray:
    w = rng.exponential(size=shape)
    return w / w.sum()


def from_conditional(prior, split: TeamSplit, conditional) -> InformationStructure:
    """Build from ``prior[x]`` and ``conditional[x, y...]`` (each state slice sums to one)."""
    prior = np.asarray(prior, dtype=float)
    cond = np.asarray(conditional, dtype=float)
    shape = (len(prior),) + split.team1_meas + split.team2_meas
    cond = cond.reshape(shape)
    w = prior.reshape((-1,) + (1,) * (cond.ndim - 1)) * cond
    axes = [FiniteSpace(STATE, len(prior))] + split.meas_axes(1) + split.meas_axes(2)
    return InformationStructure(split, JointDistribution(axes, w))


def from_channels(prior, split: TeamSplit, channels: Sequence) -> InformationStructure:
    """Conditionally independent measurements; ``channels[k]`` is a state-by-measurement matrix."""
    prior = np.asarray(prior, dtype=float)
    cond = np.ones(len(prior))
    for ch in channels:
        ch = np.asarray(ch, dtype=float)
        cond = cond[..., None] * ch.reshape((len(prior),) + (1,) * (cond.ndim - 1) + (ch.shape[1],))
    return from_conditional(prior, split, cond)


def perfect_information(prior, split: TeamSplit) -> InformationStructure:
    n = len(prior)
    return from_channels(prior, split, [np.eye(n)] * (split.n_players(1) + split.n_players(2)))


def no_information(prior, split: TeamSplit) -> InformationStructure:
    """Every measurement is the constant atom 0."""
    chans = []
    for s in split.team1_meas + split.team2_meas:
        ch = np.zeros((len(prior), s))
        ch[:, 0] = 1.0
        chans.append(ch)
    return from_channels(prior, split, chans)


def sample_with_prior(seed, split: TeamSplit, prior) -> InformationStructure:
    """Random measurement law, one simplex draw per state, given a fixed prior."""
    rng = np.random.default_rng(seed)
    prior = np.asarray(prior, dtype=float)
    meas = split.team1_meas + split.team2_meas
    cond = np.stack([_draw_simplex(rng, meas) for _ in range(len(prior))])
    return from_conditional(prior, split, cond)


def sample_info_structure(seed, split: TeamSplit, state_size: int) -> InformationStructure:
    """Seeded random structure; the same seed gives a bitwise identical result."""
    if state_size < 1:
        raise ShapeError("state_size must be >= 1")
    rng = np.random.default_rng(seed)
    prior = _draw_simplex(rng, state_size)
    meas = split.team1_meas + split.team2_meas
    cond = np.stack([_draw_simplex(rng, meas) for _ in range(state_size)])
    return from_conditional(prior, split, cond)


def perturb_within_prior(mu: InformationStructure, t: float, seed) -> InformationStructure:
    """Convex move ``(1 - t) mu + t rho`` toward a random structure with the same prior."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    if t == 0.0:
        return mu
    rho = sample_with_prior(seed, mu.split, mu.prior)
    if t == 1.0:
        return rho
    w = (1.0 - t) * mu.joint.tensor + t * rho.joint.tensor
    return InformationStructure(mu.split, JointDistribution(mu.joint.axes, w, check=False))


# ---------------------------------------------------------------------------
# JSON


class InputError(ValueError):
    """Malformed or invalid input document; message carries a location."""


def to_dict(mu: InformationStructure) -> dict:
    s = mu.split
    return {
        "state_size": mu.state_size,
        "prior": mu.prior.tolist(),
        "teams": [
            {"measurement_sizes": list(s.team1_meas), "action_sizes": list(s.team1_act)},
            {"measurement_sizes": list(s.team2_meas), "action_sizes": list(s.team2_act)},
        ],
        "joint": mu.joint.weights.tolist(),
    }


def from_dict(doc: dict, source: str = "<info>") -> InformationStructure:
    try:
        n = int(doc["state_size"])
        teams = doc["teams"]
        if len(teams) != 2:
            raise InputError(f"{source}: 'teams' must have exactly two entries")
        split = TeamSplit(
            teams[0]["measurement_sizes"], teams[0]["action_sizes"],
            teams[1]["measurement_sizes"], teams[1]["action_sizes"],
        )
        joint = np.asarray(doc["joint"], dtype=float)
        prior = np.asarray(doc["prior"], dtype=float)
    except KeyError as exc:
        raise InputError(f"{source}: missing field {exc.args[0]!r}") from None
    except (TypeError, ShapeError) as exc:
        raise InputError(f"{source}: {exc}") from None
    shape = (n,) + split.team1_meas + split.team2_meas
    if joint.size != int(np.prod(shape)):
        raise InputError(f"{source}: 'joint' has {joint.size} entries, expected {int(np.prod(shape))} for shape {shape}")
    if prior.shape != (n,):
        raise InputError(f"{source}: 'prior' has {prior.size} entries, expected {n}")
    if not np.all(np.isfinite(joint)) or (joint < 0).any():
        raise InputError(f"{source}: 'joint' has negative or non-finite entries")
    err = abs(joint.sum() - 1.0)
    if err > LOAD_MASS_TOL:
        raise InputError(f"{source}: 'joint' mass error {err!r} exceeds {LOAD_MASS_TOL}")
    joint = joint / joint.sum()
    marg = joint.reshape(n, -1).sum(axis=1)
    if np.abs(marg - prior).sum() > LOAD_MASS_TOL:
        raise InputError(f"{source}: 'prior' disagrees with the state marginal of 'joint'")
    axes = [FiniteSpace(STATE, n)] + split.meas_axes(1) + split.meas_axes(2)
    return InformationStructure(split, JointDistribution(axes, joint.reshape(shape)))


def load_json(path) -> InformationStructure:
    return from_dict(read_json(path), source=str(path))


def read_json(path) -> dict:
    text = open(path, encoding="utf-8").read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def dump_json(mu: InformationStructure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(mu), fh, indent=2)
        fh.write("\n")
