"""Top-down versus exhaustive search timing and agreement."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from typing import List, Sequence

from .dataset import make_rng
from .discretization import EXHAUSTIVE_MAX_M1, exhaustive_trace, top_down_trace
from .errors import TooLarge
from .instances import SHAPES, random_instance


@dataclass
class BenchRow:
    m1: int
    reps: int
    top_down_evaluations: int
    exhaustive_evaluations: int
    top_down_seconds: float
    exhaustive_seconds: float
    agreement: float
    sequential_agreement: float
    correct: float


@dataclass
class BenchReport:
    seed: int
    m: int
    rows: List[BenchRow]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        return cls(d["seed"], d["m"], [BenchRow(**r) for r in d["rows"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = ["%4s %5s %10s %10s %12s %12s %8s %8s %8s" % (
            "m1", "reps", "td evals", "ex evals", "td sec", "ex sec", "agree", "seq", "correct")]
        for r in self.rows:
            lines.append("%4d %5d %10d %10d %12.5f %12.5f %7.0f%% %7.0f%% %7.0f%%" % (
                r.m1, r.reps, r.top_down_evaluations, r.exhaustive_evaluations, r.top_down_seconds,
                r.exhaustive_seconds, 100 * r.agreement, 100 * r.sequential_agreement, 100 * r.correct))
        return "\n".join(lines)


def run_bench(m1_sweep: Sequence[int], reps: int = 20, seed: int = 0, m: int = 100_000) -> BenchReport:
    """Compare both searches on exact exploded instances.

    Times are per-instance means. ``agreement`` compares the simultaneous
    top-down policy with the exhaustive argmin, ``sequential_agreement``
    does the same for the re-baselining variant, and ``correct`` checks the
    top-down policy against the explosion's ground truth.
    """
    bad = [m1 for m1 in m1_sweep if not 1 <= m1 <= EXHAUSTIVE_MAX_M1]
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if bad:
        raise TooLarge("m1 values %s outside 1..%d" % (bad, EXHAUSTIVE_MAX_M1))
    rng = make_rng(seed)
    rows = []
    for m1 in m1_sweep:
        td_t = ex_t = 0.0
        agree = seq = correct = 0
        td_evals, ex_evals = set(), set()
        for r in range(reps):
            inst = random_instance(m1, rng, SHAPES[r % len(SHAPES)])
            t0 = time.perf_counter()
            td = top_down_trace(inst.joint, inst.dag, inst.node, m)
            t1 = time.perf_counter()
            ex = exhaustive_trace(inst.joint, inst.dag, inst.node, m)
            t2 = time.perf_counter()
            sq = top_down_trace(inst.joint, inst.dag, inst.node, m, strategy="sequential")
            td_t += t1 - t0
            ex_t += t2 - t1
            td_evals.add(td.evaluations)
            ex_evals.add(ex.evaluations)
            agree += td.policy == ex.policy
            seq += sq.policy == ex.policy
            correct += td.policy == inst.correct
        n = reps
        rows.append(BenchRow(m1, reps, max(td_evals), max(ex_evals),
                             td_t / n, ex_t / n, agree / n, seq / n, correct / n))
    return BenchReport(seed, m, rows)
