"""Description-length discretization of a single node.

A policy keeps a subset of the ``m1 - 1`` gaps between the node's ordered
values. Gap ``r`` sits between ranks ``r`` and ``r + 1``; keeping it as a
threshold splits the two ranks into different blocks.

The search objective is the local description length

    DL_local = (m1-1) H((k1-1)/(m1-1)) + log k1
               + 1/2 log m [ ||Pa(x)|| (k1-1) + sum_children ||Pa*(c)|| (||c||-1) ]
               - m [ I(x*; Pa(x)) + sum_children I(c; Pa*(c)) ]

with ``Pa*`` the child's parent set after the node is discretized. All
logarithms are base 2.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .dataset import DiscreteDataset, JointTable, joint_table, parent_config_count
from .errors import BnMdlError, DomainError, OverlapError, PolicyMismatch, SizeMismatch, TooLarge
from .graph import Dag
from .scoring import dl_data, dl_net

EXHAUSTIVE_MAX_M1 = 16

Source = Union[DiscreteDataset, JointTable]


# ---------------------------------------------------------------- policies

@dataclass(frozen=True)
class Policy:
    node: int
    m1: int
    thresholds: Tuple[int, ...]

    def __post_init__(self):
        th = tuple(int(t) for t in self.thresholds)
        if self.m1 < 1:
            raise PolicyMismatch("m1 must be >= 1")
        if any(b <= a for a, b in zip(th, th[1:])):
            raise PolicyMismatch("thresholds must be strictly increasing: %s" % (th,))
        if th and (th[0] < 1 or th[-1] > self.m1 - 1):
            raise PolicyMismatch("thresholds must lie in 1..%d" % (self.m1 - 1))
        object.__setattr__(self, "thresholds", th)

    @classmethod
    def full(cls, node: int, m1: int) -> "Policy":
        return cls(node, m1, tuple(range(1, m1)))

    @classmethod
    def empty(cls, node: int, m1: int) -> "Policy":
        return cls(node, m1, ())

    @property
    def k1(self) -> int:
        return len(self.thresholds) + 1

    @property
    def starts(self) -> np.ndarray:
        """0-based first rank of every block."""
        return np.array((0,) + self.thresholds, dtype=np.intp)

    def mapping(self) -> np.ndarray:
        """Block index (1-based) for each rank, indexed by rank - 1."""
        m = np.zeros(self.m1, dtype=np.int64)
        m[list(self.thresholds)] = 1
        return np.cumsum(m) + 1

    def blocks(self) -> List[List[int]]:
        edges = (0,) + self.thresholds + (self.m1,)
        return [list(range(a + 1, b + 1)) for a, b in zip(edges, edges[1:])]

    def without(self, gap: int) -> "Policy":
        return Policy(self.node, self.m1, tuple(t for t in self.thresholds if t != gap))

    def to_bar(self) -> str:
        """Bar notation such as ``12|345|6``; values are comma-separated when m1 > 9."""
        sep = "" if self.m1 <= 9 else ","
        return "|".join(sep.join(map(str, b)) for b in self.blocks())

    @classmethod
    def from_bar(cls, node: int, text: str) -> "Policy":
        delimited = "," in text or " " in text
        blocks = [b.replace(",", " ").split() if delimited else list(b.strip()) for b in text.split("|")]
        ranks = [int(v) for b in blocks for v in b]
        if ranks != list(range(1, len(ranks) + 1)):
            raise PolicyMismatch("bar notation must list 1..m1 in order: %r" % text)
        th = tuple(itertools.accumulate(len(b) for b in blocks))[:-1]
        return cls(node, len(ranks), th)

    def to_dict(self) -> dict:
        return {"node": self.node, "m1": self.m1, "thresholds": list(self.thresholds)}

    @classmethod
    def from_dict(cls, d: dict) -> "Policy":
        return cls(int(d["node"]), int(d["m1"]), tuple(d["thresholds"]))


def _check_policy(card: int, p: Policy):
    if p.m1 != card:
        raise PolicyMismatch("policy has m1=%d but node %d has %d values" % (p.m1, p.node, card))


def apply_policy(data: DiscreteDataset, p: Policy) -> DiscreteDataset:
    _check_policy(data.cardinalities[p.node - 1], p)
    return data.with_column(p.node, p.mapping()[data.column(p.node) - 1], p.k1)


def apply_policy_joint(joint: JointTable, p: Policy) -> JointTable:
    if p.node not in joint.vars:
        raise PolicyMismatch("node %d is not in the joint" % p.node)
    axis = joint.vars.index(p.node)
    _check_policy(joint.p.shape[axis], p)
    return JointTable(joint.vars, np.add.reduceat(joint.p, p.starts, axis=axis))


# ---------------------------------------------------------------- code lengths

def entropy_h(p: float) -> float:
    """Binary entropy in bits, with H(0) = H(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise DomainError("entropy_h needs 0 <= p <= 1, got %r" % p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def dl_dp(m1: int, k1: int) -> float:
    """Bits reserved for the index of the discretization policy."""
    if not 1 <= k1 <= m1:
        raise DomainError("need 1 <= k1 <= m1, got k1=%d, m1=%d" % (k1, m1))
    if m1 == 1:
        return 0.0
    return (m1 - 1) * entropy_h((k1 - 1) / (m1 - 1))


def dl_rec(data: DiscreteDataset, p: Policy) -> float:
    """Bits to recover the node's original values from its discretized values.

    ``data`` holds the undiscretized column of ``p.node``.
    """
    card = data.cardinalities[p.node - 1]
    _check_policy(card, p)
    n_v = np.bincount(data.column(p.node) - 1, minlength=card).astype(float)
    n_block = np.add.reduceat(n_v, p.starts)[p.mapping() - 1]
    nz = n_v > 0
    return float(-(n_v[nz] * np.log2(n_v[nz] / n_block[nz])).sum())


def dl_star(data: DiscreteDataset, dag: Dag, p: Policy) -> float:
    """Total discretization description length: policy + network + data + recovery."""
    disc = apply_policy(data, p)
    return (dl_dp(p.m1, p.k1) + dl_net(dag, disc.cardinalities, data.m)
            + dl_data(disc, dag) + dl_rec(data, p))


def _mi_matrix(pxy: np.ndarray) -> float:
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    mask = pxy > 0
    denom = (px * py)[mask]
    return float((pxy[mask] * np.log2(pxy[mask] / denom)).sum())


def mutual_information(joint: JointTable, partition: Tuple[Sequence[int], Sequence[int]]) -> float:
    """Plug-in mutual information in bits between two disjoint groups of variables."""
    a, b = (tuple(g) for g in partition)
    if set(a) & set(b):
        raise OverlapError("variable groups overlap: %s" % sorted(set(a) & set(b)))
    if not a or not b:
        return 0.0
    sub = joint.marginal(a + b).p
    na = int(np.prod(sub.shape[:len(a)]))
    return _mi_matrix(sub.reshape(na, -1))


# ---------------------------------------------------------------- local score

def blanket(dag: Dag, node: int) -> Tuple[int, ...]:
    """The node, its parents, children, and the children's other parents."""
    out = [node] + list(dag.parents_of(node))
    for c in dag.children_of(node):
        out.append(c)
        out.extend(dag.parents_of(c))
    seen = []
    for v in out:
        if v not in seen:
            seen.append(v)
    return tuple(seen)


class LocalScore:
    """DL_local of one node as a function of its policy.

    The relevant marginal tables are extracted once; each evaluation only
    merges rows of those tables. ``evaluations`` counts calls.
    """

    def __init__(self, source: Source, dag: Dag, node: int, m: Optional[int] = None):
        if not 1 <= node <= dag.n:
            raise SizeMismatch("node %d not in a DAG on %d nodes" % (node, dag.n))
        vars_ = blanket(dag, node)
        if isinstance(source, DiscreteDataset):
            if source.n != dag.n:
                raise SizeMismatch("DAG has %d nodes, data has %d columns" % (dag.n, source.n))
            joint = joint_table(source, vars_)
            m = source.m if m is None else m
        else:
            if m is None:
                raise BnMdlError("a sample size m is required when scoring a joint table")
            joint = source.marginal(vars_)
        self.dag, self.node, self.m = dag, node, int(m)
        self.m1 = joint.card(node)
        self.evaluations = 0
        card = joint.card

        parents = dag.parents_of(node)
        self.parent_configs = int(np.prod([card(p) for p in parents], dtype=np.int64))
        self._parent_term = None
        if parents:
            self._parent_term = joint.marginal((node,) + parents).p.reshape(self.m1, -1)
        self._child_terms = []
        for c in dag.children_of(node):
            others = tuple(p for p in dag.parents_of(c) if p != node)
            t = joint.marginal((node,) + others + (c,)).p
            cfg = int(np.prod([card(p) for p in others], dtype=np.int64))
            self._child_terms.append((t.reshape(self.m1, cfg, card(c)), cfg, card(c)))

    @property
    def connected(self) -> bool:
        return self._parent_term is not None or bool(self._child_terms)

    def slope(self) -> int:
        """Coefficient of k1 in the bracketed parameter count."""
        return self.parent_configs + sum(cfg * (cc - 1) for _, cfg, cc in self._child_terms)

    def info(self, p: Policy) -> float:
        _check_policy(self.m1, p)
        starts = p.starts
        total = 0.0
        if self._parent_term is not None:
            total += _mi_matrix(np.add.reduceat(self._parent_term, starts, axis=0))
        for t, cfg, cc in self._child_terms:
            merged = np.add.reduceat(t, starts, axis=0)
            total += _mi_matrix(merged.reshape(-1, cc))
        return total

    def penalty(self, k1: int) -> float:
        bracket = self.parent_configs * (k1 - 1) + sum(k1 * cfg * (cc - 1) for _, cfg, cc in self._child_terms)
        return dl_dp(self.m1, k1) + math.log2(k1) + 0.5 * math.log2(self.m) * bracket

    def __call__(self, p: Policy) -> float:
        self.evaluations += 1
        return self.penalty(p.k1) - self.m * self.info(p)


def info_sum(source: Source, dag: Dag, node: int, p: Policy) -> float:
    """I(x*; Pa(x)) + sum over children c of I(c; Pa*(c)), in bits."""
    return LocalScore(source, dag, node, m=1).info(p)


def dl_local(source: Source, dag: Dag, node: int, p: Policy, m: Optional[int] = None) -> float:
    return LocalScore(source, dag, node, m)(p)


# ---------------------------------------------------------------- search

@dataclass
class TopDownResult:
    policy: Policy
    score: float
    baseline: float
    removals: Dict[int, float]
    evaluations: int
    strategy: str = "simultaneous"


def top_down_trace(source: Source, dag: Dag, node: int, m: Optional[int] = None,
                   strategy: str = "simultaneous") -> TopDownResult:
    """Single-threshold top-down search with its full score trace.

    ``simultaneous`` scores the full policy and each single removal from
    it, then drops every threshold whose removal does not increase the
    score (exactly m1 evaluations). ``sequential`` instead removes the
    best qualifying threshold and re-scores from the reduced policy until
    no removal qualifies.
    """
    score = LocalScore(source, dag, node, m)
    full = Policy.full(node, score.m1)
    baseline = score(full)
    removals = {j: score(full.without(j)) for j in full.thresholds}
    if strategy == "simultaneous":
        keep = tuple(j for j in full.thresholds if removals[j] > baseline)
        policy = Policy(node, score.m1, keep)
    elif strategy == "sequential":
        policy, current, trial = full, baseline, removals
        while trial:
            j = min(trial, key=lambda g: (trial[g], g))
            if trial[j] > current:
                break
            policy, current = policy.without(j), trial[j]
            trial = {g: score(policy.without(g)) for g in policy.thresholds}
    else:
        raise BnMdlError("unknown strategy %r" % strategy)
    evaluations = score.evaluations
    return TopDownResult(policy, score(policy), baseline, removals, evaluations, strategy)


def top_down_search(source: Source, dag: Dag, node: int, m: Optional[int] = None,
                    strategy: str = "simultaneous") -> Policy:
    return top_down_trace(source, dag, node, m, strategy).policy


@dataclass
class ExhaustiveResult:
    policy: Policy
    score: float
    evaluations: int


def exhaustive_trace(source: Source, dag: Dag, node: int, m: Optional[int] = None) -> ExhaustiveResult:
    score = LocalScore(source, dag, node, m)
    m1 = score.m1
    if m1 > EXHAUSTIVE_MAX_M1:
        raise TooLarge("exhaustive search is capped at m1 <= %d (got %d)" % (EXHAUSTIVE_MAX_M1, m1))
    best_key, best = None, None
    for size in range(m1):
        for th in itertools.combinations(range(1, m1), size):
            p = Policy(node, m1, th)
            s = score(p)
            # strict < keeps the earlier (fewer, then lexicographically smaller) policy on ties
            if best_key is None or s < best_key:
                best_key, best = s, p
    return ExhaustiveResult(best, best_key, score.evaluations)


def exhaustive_search(source: Source, dag: Dag, node: int, m: Optional[int] = None) -> Tuple[Policy, float]:
    r = exhaustive_trace(source, dag, node, m)
    return r.policy, r.score


# ---------------------------------------------------------------- several nodes

@dataclass
class CycleResult:
    policies: Dict[int, Policy]
    passes: int
    converged: bool


def _view(source: Source, policies: Dict[int, Policy], skip: int) -> Source:
    for node, p in policies.items():
        if node == skip:
            continue
        source = apply_policy(source, p) if isinstance(source, DiscreteDataset) else apply_policy_joint(source, p)
    return source


def cycle_discretize(source: Source, dag: Dag, nodes: Sequence[int], max_passes: int = 10,
                     m: Optional[int] = None, initial: Optional[Dict[int, Policy]] = None) -> CycleResult:
    """Round-robin top-down search over ``nodes``.

    Each node is searched on its original values while every other listed
    node is held at its current policy. Nodes start at their full policy
    unless ``initial`` says otherwise.
    """
    nodes = list(nodes)
    if len(set(nodes)) != len(nodes):
        raise BnMdlError("nodes must be distinct")
    if max_passes < 1:
        raise BnMdlError("max_passes must be >= 1")
    if isinstance(source, DiscreteDataset):
        card = lambda v: source.cardinalities[v - 1]
    else:
        card = source.card
    policies = {v: Policy.full(v, card(v)) for v in nodes}
    if initial:
        policies.update({v: p for v, p in initial.items() if v in policies})
    for passes in range(1, max_passes + 1):
        changed = False
        for v in nodes:
            new = top_down_search(_view(source, policies, v), dag, v, m)
            if new != policies[v]:
                policies[v], changed = new, True
        if not changed:
            return CycleResult(policies, passes, True)
    return CycleResult(policies, max_passes, False)


# ---------------------------------------------------------------- penalty curve

@dataclass
class PenaltyCurve:
    m1: int
    m: int
    c: int
    parent_configs: int
    connected: bool
    values: np.ndarray  # D(k1) for k1 = 1..m1

    @property
    def increasing(self) -> bool:
        return bool(np.all(np.diff(self.values) > 0))


def penalty_values(m1: int, m: int, c: float, parent_configs: int = 1) -> np.ndarray:
    """D(k1) = (m1-1) H((k1-1)/(m1-1)) + log k1 + 1/2 log m (c k1 - ||Pa||) for k1 = 1..m1."""
    half_log_m = 0.5 * math.log2(m)
    return np.array([dl_dp(m1, k) + math.log2(k) + half_log_m * (c * k - parent_configs)
                     for k in range(1, m1 + 1)])


def penalty_curve(dag: Dag, node: int, cardinalities: Sequence[int], m1: int, m: int) -> PenaltyCurve:
    """Leading (policy-size) terms of DL_local for ``node`` as a function of k1.

    ``cardinalities`` gives every node's value count; the entry for
    ``node`` itself is ignored.
    """
    pa = parent_config_count(dag.parents_of(node), cardinalities)
    c = pa
    for ch in dag.children_of(node):
        others = [p for p in dag.parents_of(ch) if p != node]
        c += parent_config_count(others, cardinalities) * (cardinalities[ch - 1] - 1)
    connected = bool(dag.neighbors_of(node))
    return PenaltyCurve(m1, m, c, pa, connected, penalty_values(m1, m, c, pa))


# ---------------------------------------------------------------- reports

@dataclass
class DiscretizationReport:
    node: int
    m1: int
    m: int
    baseline: float
    removals: List[Tuple[int, str, float]]
    policy: Policy
    policy_score: float
    evaluations: int
    exhaustive: Optional[dict] = None
    raw_blocks: Optional[List[List[float]]] = None
    notes: List[str] = field(default_factory=list)

    @classmethod
    def build(cls, source: Source, dag: Dag, node: int, m: Optional[int] = None,
              exhaustive: bool = False, value_map=None) -> "DiscretizationReport":
        tr = top_down_trace(source, dag, node, m)
        m1 = tr.policy.m1
        full = Policy.full(node, m1)
        rem = [(j, full.without(j).to_bar(), tr.removals[j]) for j in full.thresholds]
        m_eff = source.m if isinstance(source, DiscreteDataset) else int(m)
        rep = cls(node, m1, m_eff, tr.baseline, rem, tr.policy, tr.score, tr.evaluations)
        if m1 == 1:
            rep.notes.append("node %d has a single distinct value; nothing to discretize" % node)
        if exhaustive:
            t0 = time.perf_counter()
            ex = exhaustive_trace(source, dag, node, m)
            rep.exhaustive = {"policy": ex.policy.to_dict(), "score": ex.score, "evaluations": ex.evaluations,
                              "agree": ex.policy == tr.policy, "seconds": time.perf_counter() - t0}
        if value_map is not None:
            vals = list(value_map.values)
            rep.raw_blocks = [[vals[r - 1] for r in b] for b in tr.policy.blocks()]
        return rep

    def to_dict(self) -> dict:
        return {
            "node": self.node, "m1": self.m1, "m": self.m, "baseline": self.baseline,
            "removals": [{"gap": j, "policy": bar, "dl_local": s} for j, bar, s in self.removals],
            "policy": self.policy.to_dict(), "policy_bar": self.policy.to_bar(),
            "policy_score": self.policy_score, "evaluations": self.evaluations,
            "exhaustive": self.exhaustive, "raw_blocks": self.raw_blocks, "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiscretizationReport":
        return cls(d["node"], d["m1"], d["m"], d["baseline"],
                   [(r["gap"], r["policy"], r["dl_local"]) for r in d["removals"]],
                   Policy.from_dict(d["policy"]), d["policy_score"], d["evaluations"],
                   d.get("exhaustive"), d.get("raw_blocks"), list(d.get("notes", [])))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        full = Policy.full(self.node, self.m1).to_bar()
        width = max(len(full), len("Discretization"))
        lines = ["%-*s  %14s" % (width, "Discretization", "DL local"),
                 "%-*s  %14.2f" % (width, full, self.baseline)]
        for _, bar, s in self.removals:
            lines.append("%-*s  %14.2f" % (width, bar, s))
        lines.append("%-*s  %14.2f   <- chosen" % (width, self.policy.to_bar(), self.policy_score))
        lines.append("evaluations: %d" % self.evaluations)
        if self.exhaustive is not None:
            lines.append("exhaustive: %s  %.2f  (%d evaluations)" % (
                Policy.from_dict(self.exhaustive["policy"]).to_bar(), self.exhaustive["score"],
                self.exhaustive["evaluations"]))
            lines.append("top-down == exhaustive: %s" % str(self.exhaustive["agree"]).lower())
        if self.raw_blocks is not None:
            lines.append("raw value blocks: " + " | ".join(" ".join("%g" % v for v in b) for b in self.raw_blocks))
        lines.extend("note: " + n for n in self.notes)
        return "\n".join(lines)
