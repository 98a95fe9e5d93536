"""Team problems and team-against-team games over finite information structures.

Team 1 minimizes the cost and Team 2 maximizes it. Payoff matrices are
indexed by pure team policies in the lexicographic order of
:func:`teamlab.strategy.policy_tables`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .info_struct import InformationStructure, TeamSplit
from .lp_engine import GAP_TOL, LPNumericalError, solve_matrix_game
from .prob_core import JointDistribution, ShapeError
from .strategy import (
    DEFAULT_CAP,
    MixedTeamStrategy,
    PureTeamPolicy,
    enumerate_policies,
    policy_tables,
)


@dataclass(frozen=True)
class CostTensor:
    """Cost over ``state x Team 1 actions x Team 2 actions`` (that axis order)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("cost entries must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    def scaled(self, factor: float) -> "CostTensor":
        return CostTensor(self.values * factor)


def _expected_cost_shape(info: InformationStructure) -> tuple[int, ...]:
    s = info.split
    return (info.state_size,) + s.team1_act + s.team2_act


@dataclass(frozen=True)
class TeamGame:
    info: InformationStructure
    cost: CostTensor

    def __post_init__(self):
        if not isinstance(self.cost, CostTensor):
            object.__setattr__(self, "cost", CostTensor(self.cost))
        shape = _expected_cost_shape(self.info)
        if self.cost.values.shape != shape:
            raise ShapeError(f"cost shape {self.cost.values.shape} does not match {shape}")


@dataclass(frozen=True)
class BiTeamGame:
    """General-sum game; each team minimizes its own cost."""

    info: InformationStructure
    cost1: CostTensor
    cost2: CostTensor

    def __post_init__(self):
        for name in ("cost1", "cost2"):
            c = getattr(self, name)
            if not isinstance(c, CostTensor):
                object.__setattr__(self, name, CostTensor(c))
        shape = _expected_cost_shape(self.info)
        if self.cost1.values.shape != shape or self.cost2.values.shape != shape:
            raise ShapeError(f"cost shapes must equal {shape}")

    def as_team_game(self, team: int) -> TeamGame:
        return TeamGame(self.info, self.cost1 if team == 1 else self.cost2)


@dataclass
class EquilibriumResult:
    value: float
    team1: MixedTeamStrategy
    team2: MixedTeamStrategy
    gap: float
    upper: float
    lower: float


# ---------------------------------------------------------------------------
# internals


def _flat(g) -> tuple[np.ndarray, np.ndarray]:
    """``(mu[x, y1, y2], cost[x, u1, u2])`` with joint team indices."""
    info = g.info
    s = info.split
    nx = info.state_size
    mu = info.joint.tensor.reshape(nx, int(np.prod(s.team1_meas)), int(np.prod(s.team2_meas)))
    values = g.cost.values if isinstance(g, TeamGame) else g
    c = np.asarray(values).reshape(nx, int(np.prod(s.team1_act)), int(np.prod(s.team2_act)))
    return mu, c


def _tables(split: TeamSplit, team: int, cap: int) -> np.ndarray:
    return policy_tables(split.meas_sizes(team), split.act_sizes(team), cap)


def _policies(split: TeamSplit, team: int, cap: int) -> list[PureTeamPolicy]:
    return enumerate_policies(split.meas_sizes(team), split.act_sizes(team), cap)


def _support_tables(s: MixedTeamStrategy, meas_sizes) -> np.ndarray:
    if not meas_sizes:
        return np.zeros((len(s.support), 1), dtype=np.int64)
    for p in s.support:
        if p.meas_sizes != tuple(meas_sizes):
            raise ShapeError(f"policy measurement sizes {p.meas_sizes} vs {tuple(meas_sizes)}")
    return np.stack([p.joint_table() for p in s.support])


def trivial_strategy() -> MixedTeamStrategy:
    """The single empty policy of a team with no players."""
    return MixedTeamStrategy.pure(PureTeamPolicy((), ()))


# ---------------------------------------------------------------------------
# public operations


def expected_cost(g: TeamGame, p1: MixedTeamStrategy, p2: MixedTeamStrategy = None, cost=None) -> float:
    """Expected cost of a profile; bilinear in the two weight vectors.

    ``cost`` overrides ``g.cost`` (used for the second cost of a bi-team game).
    """
    s = g.info.split
    p2 = trivial_strategy() if p2 is None else p2
    mu, c = _flat(g) if cost is None else _flat_with(g.info, cost)
    rows = _support_tables(p1, s.team1_meas)
    cols = _support_tables(p2, s.team2_meas)
    M = kernels.payoff_matrix(mu, c, rows, cols)
    return float(p1.weights @ M @ p2.weights)


def _flat_with(info: InformationStructure, cost) -> tuple[np.ndarray, np.ndarray]:
    values = cost.values if isinstance(cost, CostTensor) else np.asarray(cost, dtype=float)
    return _flat(TeamGame(info, CostTensor(values)))


def payoff_matrix(g: TeamGame, cap: int = DEFAULT_CAP) -> np.ndarray:
    mu, c = _flat(g)
    s = g.info.split
    return kernels.payoff_matrix(mu, c, _tables(s, 1, cap), _tables(s, 2, cap))


def equilibrium_value(g: TeamGame, cap: int = DEFAULT_CAP) -> EquilibriumResult:
    """Saddle value of the zero-sum game with certified gap and mixed team strategies."""
    M = payoff_matrix(g, cap)
    sol = solve_matrix_game(M)
    s = g.info.split
    team1 = MixedTeamStrategy.from_dense(_policies(s, 1, cap), sol.row)
    team2 = MixedTeamStrategy.from_dense(_policies(s, 2, cap), sol.col) if s.n_players(2) else trivial_strategy()
    return EquilibriumResult(sol.value, team1, team2, sol.gap, sol.upper, sol.lower)


def equilibrium_value_only(g: TeamGame, cap: int = DEFAULT_CAP) -> float:
    return solve_matrix_game(payoff_matrix(g, cap)).value


def team_optimal_value(mu_team: JointDistribution, cost, cap: int = DEFAULT_CAP) -> tuple[float, PureTeamPolicy]:
    """Exact minimum over pure team policies; ties go to the lowest policy index.

    ``cost`` is indexed ``[state, u_1, ..., u_n]`` with action sizes read off
    its shape.
    """
    cost = cost.values if isinstance(cost, CostTensor) else np.asarray(cost, dtype=float)
    meas = tuple(mu_team.shape[1:])
    act = tuple(cost.shape[1:])
    if cost.shape[0] != mu_team.shape[0] or len(act) != len(meas):
        raise ShapeError(f"cost shape {cost.shape} does not fit team marginal {mu_team.shape}")
    nx = mu_team.shape[0]
    mu = mu_team.tensor.reshape(nx, -1, 1)
    c = cost.reshape(nx, -1, 1)
    vals = kernels.payoff_matrix(mu, c, policy_tables(meas, act, cap), np.zeros((1, 1), dtype=np.int64))[:, 0]
    best = int(np.argmin(vals))
    policies = enumerate_policies(meas, act, cap)
    return float(vals[best]), policies[best]


def _single_player_best(reduced: np.ndarray, maximize: bool) -> tuple[float, np.ndarray]:
    """Per-measurement optimum of ``reduced[y, u]``; exact when the team has one player."""
    pick = reduced.argmax(axis=1) if maximize else reduced.argmin(axis=1)
    return float(reduced[np.arange(reduced.shape[0]), pick].sum()), pick


def best_response(g, opponent: MixedTeamStrategy, responder: int, cap: int = DEFAULT_CAP,
                  cost=None, maximize=None) -> tuple[float, PureTeamPolicy]:
    """Optimal value and a pure best reply of ``responder`` against a fixed opponent.

    By default Team 1 minimizes and Team 2 maximizes ``g.cost``; pass
    ``cost`` / ``maximize`` to respond to another objective. One-player teams
    are solved measurement by measurement without enumerating policies.
    """
    info = g.info
    s = info.split
    values = g.cost.values if cost is None else (cost.values if isinstance(cost, CostTensor) else np.asarray(cost))
    maximize = (responder == 2) if maximize is None else maximize
    mu, c = _flat_with(info, values)
    other = 2 if responder == 1 else 1
    opp = _support_tables(opponent, s.meas_sizes(other))
    # reduced[y, u] = sum_x sum_y' mu * sum_b w_b c(x, u, opp_b(y')), oriented for the responder
    if responder == 1:
        g_c = c[:, :, opp]  # (x, u1, b, y2)
        reduced = np.einsum("xyz,xubz,b->yu", mu, g_c, opponent.weights)
    else:
        g_c = np.transpose(c, (0, 2, 1))[:, :, opp]  # (x, u2, a, y1)
        reduced = np.einsum("xzy,xuaz,a->yu", mu, g_c, opponent.weights)
    meas, act = s.meas_sizes(responder), s.act_sizes(responder)
    if len(meas) == 1:
        val, pick = _single_player_best(reduced, maximize)
        return val, PureTeamPolicy((tuple(int(u) for u in pick),), act)
    tables = policy_tables(meas, act, cap)
    vals = reduced[np.arange(reduced.shape[0])[None, :], tables].sum(axis=1)
    best = int(np.argmax(vals) if maximize else np.argmin(vals))
    return float(vals[best]), enumerate_policies(meas, act, cap)[best]


def best_response_value(g, opponent: MixedTeamStrategy, responder: int, cap: int = DEFAULT_CAP) -> float:
    return best_response(g, opponent, responder, cap)[0]


@dataclass
class NashReport:
    cost1: float
    cost2: float
    best1: float
    best2: float

    @property
    def eps1(self) -> float:
        return self.cost1 - self.best1

    @property
    def eps2(self) -> float:
        return self.cost2 - self.best2

    @property
    def epsilon(self) -> float:
        return max(self.eps1, self.eps2)


def verify_epsilon_nash(bg: BiTeamGame, profile: tuple[MixedTeamStrategy, MixedTeamStrategy],
                        cap: int = DEFAULT_CAP) -> NashReport:
    """Unilateral improvement available to each team (both minimize their own cost)."""
    s1, s2 = profile
    g1, g2 = bg.as_team_game(1), bg.as_team_game(2)
    c1 = expected_cost(g1, s1, s2)
    c2 = expected_cost(g2, s1, s2)
    b1 = best_response(g1, s2, 1, cap, maximize=False)[0]
    b2 = best_response(g2, s1, 2, cap, maximize=False)[0]
    rep = NashReport(c1, c2, b1, b2)
    if rep.eps1 < -1e-10 or rep.eps2 < -1e-10:
        raise LPNumericalError(f"best response exceeds profile cost ({rep.eps1!r}, {rep.eps2!r})")
    return rep


def saddle_violation(g: TeamGame, eq: EquilibriumResult, dev1: MixedTeamStrategy, dev2: MixedTeamStrategy) -> float:
    """How much ``E(s1*, dev2) <= V* <= E(dev1, s2*)`` is violated (zero when it holds)."""
    lo = expected_cost(g, eq.team1, dev2) - eq.value
    hi = eq.value - expected_cost(g, dev1, eq.team2)
    return max(lo, hi, 0.0)


__all__ = [
    "BiTeamGame",
    "CostTensor",
    "EquilibriumResult",
    "GAP_TOL",
    "NashReport",
    "TeamGame",
    "best_response",
    "best_response_value",
    "equilibrium_value",
    "expected_cost",
    "payoff_matrix",
    "saddle_violation",
    "team_optimal_value",
    "verify_epsilon_nash",
]
