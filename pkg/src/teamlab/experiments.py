"""Seeded instance generators, continuity sweeps, and report helpers."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .games import CostTensor, TeamGame, equilibrium_value, equilibrium_value_only
from .info_struct import (
    InformationStructure,
    InputError,
    TeamSplit,
    perturb_within_prior,
    read_json,
)
from .prob_core import tv_distance
from .strategy import DEFAULT_CAP

SWEEP_TOL = 1e-8
_MASK64 = (1 << 64) - 1


def splitmix64(master: int, index: int) -> int:
    """Per-instance seed: one splitmix64 step on ``master + (index + 1) * golden``."""
    z = (int(master) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def random_cost(rng: np.random.Generator, shape) -> CostTensor:
    """Uniform entries on ``[-1, 1]`` (so the sup norm is at most one)."""
    return CostTensor(rng.uniform(-1.0, 1.0, size=shape))


def cost_shape(info: InformationStructure) -> tuple[int, ...]:
    s = info.split
    return (info.state_size,) + s.team1_act + s.team2_act


# ---------------------------------------------------------------------------
# game documents


def load_game(path, info: InformationStructure) -> dict:
    """Read a game document; returns ``{"cost": CostTensor, "cost2": CostTensor | None}``."""
    doc = read_json(path)
    shape = cost_shape(info)
    out = {}
    for key in ("cost", "cost2"):
        if key not in doc:
            if key == "cost":
                raise InputError(f"{path}: missing field 'cost'")
            out[key] = None
            continue
        arr = np.asarray(doc[key], dtype=float)
        if arr.size != int(np.prod(shape)):
            raise InputError(f"{path}: '{key}' has {arr.size} entries, expected {int(np.prod(shape))} for shape {shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError(f"{path}: '{key}' has non-finite entries")
        out[key] = CostTensor(arr.reshape(shape))
    return out


def game_to_dict(cost: CostTensor, cost2: CostTensor = None) -> dict:
    doc = {"cost": cost.values.reshape(-1).tolist()}
    if cost2 is not None:
        doc["cost2"] = cost2.values.reshape(-1).tolist()
    return doc


def _policy_doc(strategy) -> list:
    return [
        {"weight": float(w), "tables": [list(t) for t in p.tables]}
        for p, w in zip(strategy.support, strategy.weights)
    ]


def solve_document(info: InformationStructure, cost: CostTensor, cap: int = DEFAULT_CAP, seed=None,
                   timing: bool = False) -> dict:
    """Equilibrium report. Timing is opt-in so that default output is reproducible byte for byte."""
    t0 = time.perf_counter()
    eq = equilibrium_value(TeamGame(info, cost), cap)
    elapsed = time.perf_counter() - t0
    doc = {
        "tool": "teamlab",
        "version": __version__,
        "seed": seed,
        "tolerances": {"gap": 1e-8},
        "value": eq.value,
        "gap": eq.gap,
        "team1": _policy_doc(eq.team1),
        "team2": _policy_doc(eq.team2),
    }
    if timing:
        doc["timing_seconds"] = elapsed
    return doc


# ---------------------------------------------------------------------------
# continuity sweep


@dataclass
class SweepRecord:
    t: float
    tv: float
    value: float
    bound: float

    def ok(self, value0: float, tol: float = SWEEP_TOL) -> bool:
        return abs(self.value - value0) <= self.bound + tol


def continuity_sweep(info: InformationStructure, cost: CostTensor, steps: int, seed, cap: int = DEFAULT_CAP) -> list[SweepRecord]:
    """Equilibrium value along ``(1 - t) mu + t rho`` for ``t = 0, 1/steps, ..., 1``."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    norm = cost.sup_norm
    records = []
    for k in range(steps + 1):
        t = k / steps
        mu_t = perturb_within_prior(info, t, seed)
        tv = tv_distance(mu_t.joint, info.joint)
        value = equilibrium_value_only(TeamGame(mu_t, cost), cap)
        records.append(SweepRecord(t, tv, value, norm * tv))
    return records


def sweep_violations(records: list[SweepRecord], tol: float = SWEEP_TOL) -> list[SweepRecord]:
    v0 = records[0].value
    return [r for r in records if not r.ok(v0, tol)]


def sweep_csv(records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "tv", "value", "bound"])
    for r in records:
        w.writerow([f"{r.t:.17g}", f"{r.tv:.17g}", f"{r.value:.17g}", f"{r.bound:.17g}"])
    return buf.getvalue()


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def random_two_team_split(rng: np.random.Generator, players=(2, 2), combos=((2, 2), (2, 3), (3, 2))) -> TeamSplit:
    picks = [combos[i] for i in rng.integers(0, len(combos), size=sum(players))]
    n1 = players[0]
    return TeamSplit(
        tuple(p[0] for p in picks[:n1]), tuple(p[1] for p in picks[:n1]),
        tuple(p[0] for p in picks[n1:]), tuple(p[1] for p in picks[n1:]),
    )
