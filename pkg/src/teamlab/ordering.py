"""Blackwell and Le Cam comparison of information structures.

The correlated garblings of a structure form a polytope whose vertices are
the tuples of deterministic per-player maps. Membership, deficiency and the
team-against-team test are all L1 projection problems onto such hulls; the
LP duals give bounded cost functions that certify non-comparability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .info_struct import (
    CorrelatedGarbling,
    InformationStructure,
    TeamSplit,
    apply_correlated_garbling,
    push_axes,
)
from .lp_engine import (
    CERT_TOL,
    MEMBER_TOL,
    LinearProgram,
    LPNumericalError,
    SeparationCertificate,
    convex_membership,
    l1_projection,
    separating_functional,
    solve_lp,
)
from .prob_core import JointDistribution
from .strategy import DEFAULT_CAP, CapExceededError, policy_tables

PRIOR_MATCH_TOL = 1e-9


class IncomparableInputs(ValueError):
    """Structures live on different frames (state space, prior or split)."""


@dataclass(frozen=True)
class GarblingVertexSet:
    """Every tuple of deterministic per-player maps, lexicographic order.

    ``maps[g]`` is the joint map of vertex ``g`` on row-major joint indices.
    """

    in_sizes: tuple[int, ...]
    out_sizes: tuple[int, ...]
    maps: np.ndarray

    def __len__(self) -> int:
        return self.maps.shape[0]

    def tables(self, g: int) -> tuple[np.ndarray, ...]:
        """Per-player tables of vertex ``g``."""
        counts = [o ** i for i, o in zip(self.in_sizes, self.out_sizes)]
        idx = np.unravel_index(g, counts)
        out = []
        for k, (n_in, n_out) in enumerate(zip(self.in_sizes, self.out_sizes)):
            digits = np.unravel_index(idx[k], (n_out,) * n_in) if n_in else ()
            out.append(np.array(digits, dtype=np.int64).reshape(-1))
        return tuple(out)

    def garbling(self, weights: dict[int, float]) -> CorrelatedGarbling:
        """Correlated garbling mixing the given vertices."""
        keys = sorted(weights)
        w = np.array([weights[k] for k in keys])
        return CorrelatedGarbling(tuple(self.tables(k) for k in keys), w / w.sum(), self.in_sizes, self.out_sizes)


def enumerate_pure_garblings(in_sizes, out_sizes=None, cap: int = DEFAULT_CAP) -> GarblingVertexSet:
    in_sizes = tuple(int(s) for s in in_sizes)
    out_sizes = in_sizes if out_sizes is None else tuple(int(s) for s in out_sizes)
    # a garbling vertex is a pure policy whose "actions" are output atoms
    try:
        maps = policy_tables(in_sizes, out_sizes, cap)
    except CapExceededError as exc:
        raise CapExceededError("pure garblings", exc.count, cap) from None
    return GarblingVertexSet(in_sizes, out_sizes, maps)


def _check_frames(mu: InformationStructure, nu: InformationStructure) -> None:
    if mu.state_size != nu.state_size:
        raise IncomparableInputs("structures have different state spaces")
    if float(np.abs(mu.prior - nu.prior).sum()) > PRIOR_MATCH_TOL:
        raise IncomparableInputs("structures have different priors")
    if mu.split.n_players(1) != nu.split.n_players(1) or mu.split.n_players(2) != nu.split.n_players(2):
        raise IncomparableInputs("structures have different player counts")


def hull_vertices(mu: InformationStructure, players="both", out_sizes=None, cap: int = DEFAULT_CAP):
    """``(vertex set, array of garbled tensors flattened to rows)`` for the selected players."""
    names = mu.axis_names(players)
    idx = [mu.joint.axis_index(n) for n in names]
    in_sizes = tuple(mu.joint.shape[i] for i in idx)
    vs = enumerate_pure_garblings(in_sizes, out_sizes, cap)
    pushed = push_axes(mu.joint.tensor, idx, vs.maps, vs.out_sizes)
    return vs, pushed.reshape(len(vs), -1)


@dataclass
class OrderingResult:
    comparable: bool
    distance: float
    status: str
    witness: dict = None
    witness2: dict = None
    certificate: SeparationCertificate = None
    vertices: GarblingVertexSet = field(default=None, repr=False)
    vertices2: GarblingVertexSet = field(default=None, repr=False)

    def witness_garbling(self) -> CorrelatedGarbling:
        return self.vertices.garbling(self.witness)

    def witness_garbling2(self) -> CorrelatedGarbling:
        return self.vertices2.garbling(self.witness2)

    def to_dict(self) -> dict:
        doc = {"comparable": bool(self.comparable), "status": self.status, "distance": self.distance}
        if self.witness is not None:
            doc["witness_weights"] = {str(k): v for k, v in self.witness.items()}
        if self.witness2 is not None:
            doc["witness_weights_2"] = {str(k): v for k, v in self.witness2.items()}
        if self.certificate is not None:
            doc["certificate"] = {"cost": self.certificate.f.tolist(), "gap": self.certificate.gap}
        return doc


def _sparse(weights: np.ndarray, drop: float = 0.0) -> dict[int, float]:
    return {int(i): float(weights[i]) for i in np.flatnonzero(weights > drop)}


def is_correlated_garbling(mu: InformationStructure, nu: InformationStructure, players="both",
                           cap: int = DEFAULT_CAP) -> OrderingResult:
    """Is ``nu`` (within L1 1e-9) a correlated garbling of ``mu`` on the selected players?

    Output spaces are ``nu``'s measurement spaces, so ``nu`` may use
    different measurement sizes than ``mu``.
    """
    _check_frames(mu, nu)
    out_sizes = tuple(nu.joint.shape[nu.joint.axis_index(n)] for n in nu.axis_names(players))
    if players != "both":
        other = 2 if players == 1 else 1
        if mu.split.meas_sizes(other) != nu.split.meas_sizes(other):
            raise IncomparableInputs("ungarbled team has different measurement spaces")
    vs, V = hull_vertices(mu, players, out_sizes, cap)
    q = nu.joint.weights
    res = convex_membership(q, V)
    if res.member:
        return OrderingResult(True, res.distance, res.status, witness=_sparse(res.weights), vertices=vs)
    return OrderingResult(False, res.distance, res.status, certificate=res.certificate, vertices=vs)


def single_team_view(mu: InformationStructure) -> InformationStructure:
    """Treat every player as a Team 1 member with actions equal to measurements."""
    meas = mu.split.team1_meas + mu.split.team2_meas
    split = TeamSplit(meas, meas)
    axes = [mu.state_space] + split.meas_axes(1)
    return InformationStructure(split, JointDistribution(axes, mu.joint.tensor, check=False))


@dataclass
class SeparatingGame:
    """Identity-class team game built from a separation certificate."""

    info: InformationStructure  # single-team view of mu, actions = measurements
    cost: np.ndarray  # [state, u_1, ..., u_n]
    gap: float


def separating_cost(mu: InformationStructure, nu: InformationStructure, cap: int = DEFAULT_CAP) -> SeparatingGame:
    """Bounded cost under which ``nu`` with truthful play beats every policy under ``mu``.

    Raises ``ValueError`` if ``nu`` is a correlated garbling of ``mu``.
    """
    res = is_correlated_garbling(mu, nu, "both", cap)
    if res.comparable or res.certificate is None:
        raise ValueError(f"no separating cost: structures are comparable (status {res.status})")
    if nu.joint.shape != mu.joint.shape:
        raise ValueError("identity-class game needs equal measurement spaces")
    cost = res.certificate.f.reshape(nu.joint.shape)
    return SeparatingGame(single_team_view(mu), cost, res.certificate.gap)


@dataclass
class DeficiencyResult:
    delta: float
    weights: dict
    residual: float
    certificate: SeparationCertificate = None
    vertices: GarblingVertexSet = field(default=None, repr=False)

    def to_dict(self) -> dict:
        doc = {"delta": self.delta, "residual": self.residual,
               "witness_weights": {str(k): v for k, v in self.weights.items()}}
        if self.certificate is not None:
            doc["certificate"] = {"cost": self.certificate.f.tolist(), "gap": self.certificate.gap}
        return doc


def lecam_deficiency(mu: InformationStructure, nu: InformationStructure, players="both",
                     cap: int = DEFAULT_CAP) -> DeficiencyResult:
    """``min`` over correlated garblings ``k`` of ``tv_distance(k mu, nu)``, as one LP.

    When the deficiency is positive the dual functional is attached: it is an
    identity-class cost with ``max|f| <= 1`` that attains the deficiency.
    """
    _check_frames(mu, nu)
    out_sizes = tuple(nu.joint.shape[nu.joint.axis_index(n)] for n in nu.axis_names(players))
    vs, V = hull_vertices(mu, players, out_sizes, cap)
    q = nu.joint.weights
    delta, lam = l1_projection(q, V)
    cert = None
    if delta > CERT_TOL:
        cert = separating_functional(q, V)
        if abs(cert.gap - delta) > CERT_TOL:
            raise LPNumericalError(f"deficiency dual {cert.gap!r} disagrees with primal {delta!r}")
    residual = float(np.abs(lam @ V - q).sum())
    return DeficiencyResult(delta, _sparse(lam), residual, cert, vs)


def lecam_distance(mu: InformationStructure, nu: InformationStructure, cap: int = DEFAULT_CAP) -> float:
    return max(lecam_deficiency(mu, nu, cap=cap).delta, lecam_deficiency(nu, mu, cap=cap).delta)


def _polytope_distance(V1: np.ndarray, V2: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    k1, d = V1.shape
    k2 = V2.shape[0]
    # variables (lam1, lam2, s+, s-): min sum s  s.t.  V1^T lam1 - V2^T lam2 + s+ - s- = 0
    A = np.hstack([V1.T, -V2.T, np.eye(d), -np.eye(d)])
    A = np.vstack([
        A,
        np.concatenate([np.ones(k1), np.zeros(k2 + 2 * d)]),
        np.concatenate([np.zeros(k1), np.ones(k2), np.zeros(2 * d)]),
    ])
    c = np.concatenate([np.zeros(k1 + k2), np.ones(2 * d)])
    sol = solve_lp(LinearProgram(c, A, ["="] * (d + 2), np.concatenate([np.zeros(d), [1.0, 1.0]])))
    lam1 = np.clip(sol.x[:k1], 0, None)
    lam2 = np.clip(sol.x[k1:k1 + k2], 0, None)
    lam1, lam2 = lam1 / lam1.sum(), lam2 / lam2.sum()
    return float(np.abs(lam1 @ V1 - lam2 @ V2).sum()), lam1, lam2


def _polytope_separator(V1: np.ndarray, V2: np.ndarray) -> SeparationCertificate:
    """``f`` maximizing ``min_g <f, V1_g> - max_h <f, V2_h>`` over ``max|f| <= 1``."""
    k1, d = V1.shape
    k2 = V2.shape[0]
    # variables (f, t1, t2): min t2 - t1  s.t.  t1 - <f, v> <= 0,  <f, w> - t2 <= 0
    A = np.vstack([
        np.hstack([-V1, np.ones((k1, 1)), np.zeros((k1, 1))]),
        np.hstack([V2, np.zeros((k2, 1)), -np.ones((k2, 1))]),
    ])
    c = np.concatenate([np.zeros(d), [-1.0, 1.0]])
    sol = solve_lp(LinearProgram(c, A, ["<="] * (k1 + k2), np.zeros(k1 + k2),
                                 [(-1.0, 1.0)] * d + [(None, None)] * 2))
    f = np.clip(sol.x[:d], -1.0, 1.0)
    return SeparationCertificate(f, float((V1 @ f).min() - (V2 @ f).max()))


def tat_compare(mu: InformationStructure, nu: InformationStructure, cap: int = DEFAULT_CAP) -> OrderingResult:
    """Look for garblings with ``kappa1 mu == kappa2 nu``.

    ``kappa1`` acts on Team 1's measurements of ``mu`` only and ``kappa2`` on
    Team 2's measurements of ``nu`` only (both with equal input and output
    spaces). When none exist the certificate ``f`` satisfies
    ``<f, kappa1 mu> - <f, kappa2 nu> >= gap`` for every pair.
    """
    _check_frames(mu, nu)
    if mu.split != nu.split:
        raise IncomparableInputs("structures must share the team split")
    vs1, V1 = hull_vertices(mu, 1, cap=cap)
    vs2, V2 = hull_vertices(nu, 2, cap=cap)
    dist, lam1, lam2 = _polytope_distance(V1, V2)
    if dist <= MEMBER_TOL:
        return OrderingResult(True, dist, "member", witness=_sparse(lam1), witness2=_sparse(lam2),
                              vertices=vs1, vertices2=vs2)
    if dist <= CERT_TOL:
        return OrderingResult(False, dist, "undecided", vertices=vs1, vertices2=vs2)
    cert = _polytope_separator(V1, V2)
    if abs(cert.gap - dist) > CERT_TOL:
        raise LPNumericalError(f"polytope separation {cert.gap!r} disagrees with distance {dist!r}")
    return OrderingResult(False, dist, "separated", certificate=cert, vertices=vs1, vertices2=vs2)


def apply_witness(mu: InformationStructure, res: OrderingResult, team=1) -> InformationStructure:
    return apply_correlated_garbling(mu, res.witness_garbling(), team)
