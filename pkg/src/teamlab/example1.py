"""Discretized replica of the two-team game in which more information hurts.

State, measurements and actions live on the grid ``{0, 1/(m-1), ..., 1}``
with a uniform state, one player per team (the cost depends on a team only
through its average action). Team ``i`` pays

* ``(x - u_i)^2 + 2`` when the other team's action equals ``x``,
* ``2 (x - u_i)^2 + (u_1 - u_2)^2`` otherwise.

Under full information the branch test is exact grid equality. Without
information the actions are independent of an atomless state in the
continuous game, so the equality branch has probability zero for every
policy; the no-information replica therefore uses the second branch
everywhere. :attr:`Example1Report.none_cost_grid_tie` records what exact
grid equality would give instead (it adds the ``1/m`` atom at the midpoint).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .games import BiTeamGame, CostTensor, NashReport, expected_cost, verify_epsilon_nash
from .info_struct import TeamSplit, from_channels
from .strategy import MixedTeamStrategy, PureTeamPolicy


def grid(m: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, m)


def _costs(m: int, tie_branch: bool) -> tuple[np.ndarray, np.ndarray]:
    g = grid(m)
    x = g[:, None, None]
    u1 = g[None, :, None]
    u2 = g[None, None, :]
    idx = np.arange(m)
    tie2 = (idx[None, None, :] == idx[:, None, None])  # team 2 action equals x
    tie1 = (idx[None, :, None] == idx[:, None, None])
    coop = (u1 - u2) ** 2
    c1 = 2 * (x - u1) ** 2 + coop
    c2 = 2 * (x - u2) ** 2 + coop
    if tie_branch:
        c1 = np.where(tie2, (x - u1) ** 2 + 2, c1)
        c2 = np.where(tie1, (x - u2) ** 2 + 2, c2)
    return np.broadcast_to(c1, (m, m, m)).copy(), np.broadcast_to(c2, (m, m, m)).copy()


def grid_variance(m: int) -> float:
    """Variance of the uniform law on the m-point grid, ``(m + 1) / (12 (m - 1))``."""
    return (m + 1) / (12.0 * (m - 1))


def full_information_game(m: int) -> BiTeamGame:
    prior = np.full(m, 1.0 / m)
    split = TeamSplit((m,), (m,), (m,), (m,))
    info = from_channels(prior, split, [np.eye(m), np.eye(m)])
    c1, c2 = _costs(m, tie_branch=True)
    return BiTeamGame(info, CostTensor(c1), CostTensor(c2))


def no_information_game(m: int, tie_branch: bool = False) -> BiTeamGame:
    prior = np.full(m, 1.0 / m)
    split = TeamSplit((1,), (m,), (1,), (m,))
    info = from_channels(prior, split, [np.ones((m, 1)), np.ones((m, 1))])
    c1, c2 = _costs(m, tie_branch=tie_branch)
    return BiTeamGame(info, CostTensor(c1), CostTensor(c2))


@dataclass
class Example1Report:
    m: int
    full_cost1: float
    full_cost2: float
    full_epsilon: float
    none_cost1: float
    none_cost2: float
    none_epsilon: float
    none_cost_formula: float
    none_cost_grid_tie: float
    more_information_hurts: bool

    def to_dict(self) -> dict:
        return asdict(self)


def full_information_profile(m: int):
    p = MixedTeamStrategy.pure(PureTeamPolicy((tuple(range(m)),), (m,)))
    return p, p


def no_information_profile(m: int):
    mid = (m - 1) // 2
    p = MixedTeamStrategy.pure(PureTeamPolicy(((mid,),), (m,)))
    return p, p


def build_example1(m: int = 101) -> Example1Report:
    """Build both instances, verify the reference profiles, and compare their costs."""
    if m < 3:
        raise ValueError(f"grid size must be at least 3, got {m}")
    full = full_information_game(m)
    prof_full = full_information_profile(m)
    rep_full: NashReport = verify_epsilon_nash(full, prof_full)

    none = no_information_game(m)
    prof_none = no_information_profile(m)
    rep_none: NashReport = verify_epsilon_nash(none, prof_none)

    tie = no_information_game(m, tie_branch=True)
    tie_cost = expected_cost(tie.as_team_game(1), *prof_none)

    return Example1Report(
        m=m,
        full_cost1=rep_full.cost1,
        full_cost2=rep_full.cost2,
        full_epsilon=rep_full.epsilon,
        none_cost1=rep_none.cost1,
        none_cost2=rep_none.cost2,
        none_epsilon=rep_none.epsilon,
        none_cost_formula=2.0 * grid_variance(m),
        none_cost_grid_tie=tie_cost,
        more_information_hurts=bool(min(rep_full.cost1, rep_full.cost2) > max(rep_none.cost1, rep_none.cost2)),
    )
