"""Maximum-likelihood fitting and whole-network scores (LL, AIC, BIC, MDL).

Description lengths are real-valued base-2 code lengths, no ceilings.
Parentless nodes have one (empty) parent configuration and contribute no
parent indices to the structure cost.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np

from .dataset import CountTable, DiscreteDataset, counts, parent_config_count
from .errors import BnMdlError, SizeMismatch
from .graph import Dag, equivalence_key, new_dag

CRITERIA = ("ll", "aic", "bic", "mdl")
LN2 = math.log(2.0)


@dataclass(frozen=True)
class ThetaTable:
    """MLE conditional probabilities; ``defined[i - 1][j - 1]`` is False for unseen configurations."""

    theta: Tuple[np.ndarray, ...]
    defined: Tuple[np.ndarray, ...]


class LogLikelihood(NamedTuple):
    bits: float
    nats: float


def mle_theta(ct: CountTable) -> ThetaTable:
    thetas, defined = [], []
    for nk in ct.n:
        tot = nk.sum(axis=1)
        ok = tot > 0
        th = np.full(nk.shape, np.nan)
        th[ok] = nk[ok] / tot[ok, None]
        thetas.append(th)
        defined.append(ok)
    return ThetaTable(tuple(thetas), tuple(defined))


def _nk_log_theta(nk: np.ndarray) -> float:
    """sum_jk n_jk ln(n_jk / n_j.) with 0 log 0 = 0."""
    tot = nk.sum(axis=1, keepdims=True)
    mask = nk > 0
    ratio = np.divide(nk, tot, out=np.ones(nk.shape), where=mask)
    return float((nk[mask] * np.log(ratio[mask])).sum())


def _check(data: DiscreteDataset, dag: Dag):
    if dag.n != data.n:
        raise SizeMismatch("DAG has %d nodes, data has %d columns" % (dag.n, data.n))


def log_likelihood(data: DiscreteDataset, dag: Dag) -> LogLikelihood:
    _check(data, dag)
    nats = sum(_nk_log_theta(nk) for nk in counts(data, dag).n)
    return LogLikelihood(nats / LN2, nats)


def parameter_count(dag: Dag, cardinalities: Sequence[int]) -> int:
    return sum(parent_config_count(dag.parents_of(i), cardinalities) * (cardinalities[i - 1] - 1)
               for i in range(1, dag.n + 1))


def structure_bits(dag: Dag, cardinalities: Sequence[int]) -> float:
    """The parameter-free part of DL_net: value counts plus parent lists."""
    logn = math.log2(dag.n)
    return (sum(math.log2(c) for c in cardinalities)
            + sum((1 + len(dag.parents_of(i))) * logn for i in range(1, dag.n + 1)))


def dl_net(dag: Dag, cardinalities: Sequence[int], m: int) -> float:
    if len(cardinalities) != dag.n:
        raise SizeMismatch("need one cardinality per node")
    return structure_bits(dag, cardinalities) + 0.5 * math.log2(m) * parameter_count(dag, cardinalities)


def dl_data(data: DiscreteDataset, dag: Dag) -> float:
    return -log_likelihood(data, dag).bits


def score_network(data: DiscreteDataset, dag: Dag, criterion: str) -> float:
    """LL is returned as ln L (larger is better); AIC, BIC and MDL are minimized."""
    crit = criterion.lower()
    if crit not in CRITERIA:
        raise BnMdlError("unknown criterion %r" % criterion)
    ll = log_likelihood(data, dag)
    if crit == "ll":
        return ll.nats
    if crit == "mdl":
        return dl_net(dag, data.cardinalities, data.m) - ll.bits
    k = parameter_count(dag, data.cardinalities)
    if crit == "aic":
        return -2 * ll.nats + 2 * k
    return -2 * ll.nats + k * math.log(data.m)


# ---------------------------------------------------------------- recovery

@dataclass
class CandidateScore:
    edges: List[Tuple[int, int]]
    ll_nats: float
    ll_bits: float
    params: int
    aic: float
    bic: float
    dl_net: float
    dl_data: float
    mdl: float

    def value(self, criterion: str) -> float:
        return self.ll_nats if criterion == "ll" else getattr(self, criterion)


def score_candidate(data: DiscreteDataset, dag: Dag) -> CandidateScore:
    _check(data, dag)
    ll = log_likelihood(data, dag)
    k = parameter_count(dag, data.cardinalities)
    net = dl_net(dag, data.cardinalities, data.m)
    return CandidateScore(
        edges=[tuple(e) for e in dag.edges],
        ll_nats=ll.nats, ll_bits=ll.bits, params=k,
        aic=-2 * ll.nats + 2 * k,
        bic=-2 * ll.nats + k * math.log(data.m),
        dl_net=net, dl_data=-ll.bits, mdl=net - ll.bits,
    )


@dataclass
class ScoreReport:
    n: int
    m: int
    criterion: str
    candidates: List[CandidateScore]
    rankings: Dict[str, List[int]]
    winners: List[int]
    winner_classes: List[List[int]]

    def winner_dags(self) -> List[Dag]:
        return [new_dag(self.n, self.candidates[w].edges) for w in self.winners]

    def to_dict(self) -> dict:
        d = asdict(self)
        for c in d["candidates"]:
            c["edges"] = [list(e) for e in c["edges"]]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreReport":
        cands = []
        for c in d["candidates"]:
            c = dict(c)
            c["edges"] = [tuple(e) for e in c["edges"]]
            cands.append(CandidateScore(**c))
        return cls(d["n"], d["m"], d["criterion"], cands, {k: list(v) for k, v in d["rankings"].items()},
                   list(d["winners"]), [list(g) for g in d["winner_classes"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = ["%4s  %-24s %16s %16s %16s %16s" % ("#", "edges", "AIC", "BIC", "MDL", "lnL")]
        win = set(self.winners)
        for k, c in enumerate(self.candidates):
            edges = ",".join("%d>%d" % e for e in c.edges) or "-"
            lines.append("%4d%s %-24s %16.3f %16.3f %16.3f %16.3f" % (
                k, "*" if k in win else " ", edges, c.aic, c.bic, c.mdl, c.ll_nats))
        lines.append("winners by %s (grouped by Markov equivalence): %s" % (
            self.criterion.upper(), " | ".join(" ".join(map(str, g)) for g in self.winner_classes)))
        return "\n".join(lines)


def _ranking(values: Sequence[float], larger_better: bool) -> List[int]:
    keyed = sorted(range(len(values)), key=lambda k: (-values[k] if larger_better else values[k], k))
    return keyed


def recover(data: DiscreteDataset, candidates: Sequence[Dag], criterion: str = "mdl",
            rel_tol: float = 1e-9) -> ScoreReport:
    """Score every candidate and return the best-scoring set grouped by equivalence class.

    Candidates whose score is within ``rel_tol`` (relative) of the best
    score count as winners, since Markov-equivalent graphs only tie up to
    rounding. Candidates keep their input order.
    """
    crit = criterion.lower()
    if crit not in CRITERIA:
        raise BnMdlError("unknown criterion %r" % criterion)
    if not candidates:
        raise BnMdlError("recover needs at least one candidate")
    scored = [score_candidate(data, d) for d in candidates]
    rankings = {c: _ranking([s.value(c) for s in scored], c == "ll") for c in CRITERIA}
    vals = np.array([s.value(crit) for s in scored])
    best = vals.max() if crit == "ll" else vals.min()
    tol = rel_tol * max(abs(best), 1.0)
    winners = [k for k in rankings[crit] if abs(vals[k] - best) <= tol]
    winners.sort()
    classes: dict = {}
    for k in winners:
        classes.setdefault(equivalence_key(candidates[k]), []).append(k)
    return ScoreReport(candidates[0].n, data.m, crit, scored, rankings, winners, list(classes.values()))
