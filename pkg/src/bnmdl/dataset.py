"""Discrete data: ingestion, relabeling, counting, sampling and explosion.

Values of a discrete column are integers ``1..card``. Parent
configurations are numbered in mixed radix with the lowest-indexed
parent as the fastest-varying digit, so for parents ``(2, 3)`` of
cardinalities ``(a, b)`` configuration ``j = (x2 - 1) + a * (x3 - 1) + 1``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyData, ParseError, SizeMismatch, SpecMismatch
from .graph import Dag, new_dag

PROB_TOL = 1e-9


def make_rng(seed: int, jumps: int = 0) -> np.random.Generator:
    """PCG64 stream for ``seed``, portable across platforms.

    ``jumps`` advances the state by multiples of 2**127 draws, giving a
    stream that cannot overlap the unjumped one. Sampling uses jump 0 and
    explosion jump 1, so one seed can drive both.
    """
    bits = np.random.PCG64(int(seed))
    return np.random.Generator(bits.jumped(jumps) if jumps else bits)


# ---------------------------------------------------------------- data types

@dataclass(frozen=True)
class RawDataset:
    names: Tuple[str, ...]
    rows: np.ndarray  # (m, n) float

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class ValueMap:
    """Sorted distinct raw values of one column; value ``values[r - 1]`` has rank ``r``."""

    values: Tuple[float, ...]

    @property
    def cardinality(self) -> int:
        return len(self.values)

    def rank(self, raw: float) -> int:
        return self.values.index(raw) + 1


@dataclass(frozen=True, eq=False)
class DiscreteDataset:
    values: np.ndarray  # (m, n) int, 1-based
    cardinalities: Tuple[int, ...]
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64)
        if v.ndim != 2:
            raise SizeMismatch("dataset values must be a 2-d array")
        cards = tuple(int(c) for c in self.cardinalities)
        if len(cards) != v.shape[1]:
            raise SizeMismatch("%d cardinalities for %d columns" % (len(cards), v.shape[1]))
        if any(c < 1 for c in cards):
            raise SpecMismatch("cardinalities must be >= 1")
        if v.size and (v.min(axis=0) < 1).any() or v.size and (v.max(axis=0) > np.array(cards)).any():
            raise SpecMismatch("values fall outside 1..cardinality")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "cardinalities", cards)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.values[:, i - 1]

    def with_column(self, i: int, col, card: int) -> "DiscreteDataset":
        vals = self.values.copy()
        vals[:, i - 1] = col
        cards = list(self.cardinalities)
        cards[i - 1] = card
        return DiscreteDataset(vals, tuple(cards), self.names)

    def __eq__(self, other):
        if not isinstance(other, DiscreteDataset):
            return NotImplemented
        return self.cardinalities == other.cardinalities and np.array_equal(self.values, other.values)

    def to_csv(self, path=None) -> str:
        names = self.names or tuple("X%d" % (i + 1) for i in range(self.n))
        buf = io.StringIO()
        buf.write(",".join(names) + "\n")
        for row in self.values:
            buf.write(",".join(map(str, row)) + "\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


@dataclass(frozen=True, eq=False)
class BnSpec:
    """A DAG with its conditional probability tables.

    ``cpt[i - 1]`` has shape ``(n_parent_configs, card_i)``.
    """

    dag: Dag
    cardinalities: Tuple[int, ...]
    cpt: Tuple[np.ndarray, ...]
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        cards = tuple(int(c) for c in self.cardinalities)
        if len(cards) != self.dag.n or len(self.cpt) != self.dag.n:
            raise SpecMismatch("BnSpec needs one cardinality and one CPT per node")
        tables = []
        for i in range(1, self.dag.n + 1):
            t = np.array(self.cpt[i - 1], dtype=float)
            want = (parent_config_count(self.dag.parents_of(i), cards), cards[i - 1])
            if t.shape != want:
                raise SpecMismatch("CPT of node %d has shape %s, expected %s" % (i, t.shape, want))
            if (t < 0).any() or np.abs(t.sum(axis=1) - 1).max() > PROB_TOL:
                raise SpecMismatch("CPT rows of node %d must be nonnegative and sum to 1" % i)
            t.setflags(write=False)
            tables.append(t)
        object.__setattr__(self, "cardinalities", cards)
        object.__setattr__(self, "cpt", tuple(tables))


@dataclass(frozen=True)
class CountTable:
    """``n[i - 1][j - 1, k - 1]`` is the count n_ijk."""

    n: Tuple[np.ndarray, ...]
    m: int

    def marginal(self, i: int) -> np.ndarray:
        return self.n[i - 1].sum(axis=1)


@dataclass(frozen=True, eq=False)
class ExplosionSpec:
    """Replace original value ``v`` of ``node`` by ``offset_v + l`` with probability ``groups[v-1][l-1]``."""

    node: int
    groups: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        groups = tuple(tuple(float(q) for q in g) for g in self.groups)
        for v, g in enumerate(groups, 1):
            if not g or min(g) < 0 or abs(sum(g) - 1) > PROB_TOL:
                raise SpecMismatch("group of value %d must be nonempty probabilities summing to 1" % v)
        object.__setattr__(self, "groups", groups)

    @property
    def sizes(self) -> List[int]:
        return [len(g) for g in self.groups]

    @property
    def new_cardinality(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> List[int]:
        return [0] + list(np.cumsum(self.sizes)[:-1])

    def group_of(self) -> np.ndarray:
        """Original value (1-based) for each exploded value, indexed by exploded value - 1."""
        return np.repeat(np.arange(1, len(self.groups) + 1), self.sizes)

    def correct_thresholds(self) -> Tuple[int, ...]:
        """Gap positions separating different original values."""
        return tuple(int(t) for t in np.cumsum(self.sizes)[:-1])


@dataclass(frozen=True, eq=False)
class JointTable:
    """Joint probabilities over ``vars``; axis ``a`` of ``p`` belongs to node ``vars[a]``."""

    vars: Tuple[int, ...]
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        vars_ = tuple(int(v) for v in self.vars)
        if p.ndim != len(vars_) or len(set(vars_)) != len(vars_):
            raise SizeMismatch("joint table needs one axis per distinct variable")
        if (p < 0).any() or abs(p.sum() - 1) > 1e-12:
            raise SpecMismatch("joint table entries must be nonnegative with total mass 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "vars", vars_)

    @property
    def cardinalities(self) -> Tuple[int, ...]:
        return self.p.shape

    def card(self, var: int) -> int:
        return self.p.shape[self.vars.index(var)]

    def marginal(self, keep: Sequence[int]) -> "JointTable":
        keep = tuple(keep)
        missing = [v for v in keep if v not in self.vars]
        if missing:
            raise SizeMismatch("variables %s not in joint over %s" % (missing, self.vars))
        drop = tuple(a for a, v in enumerate(self.vars) if v not in keep)
        q = self.p.sum(axis=drop) if drop else self.p
        remaining = [v for v in self.vars if v in keep]
        q = np.transpose(q, [remaining.index(v) for v in keep])
        return JointTable(keep, q)

    def __eq__(self, other):
        if not isinstance(other, JointTable):
            return NotImplemented
        return self.vars == other.vars and np.array_equal(self.p, other.p)


# ---------------------------------------------------------------- ingestion

def _parse_float(cell, lineno, col):
    try:
        x = float(cell)
    except ValueError:
        raise ParseError("line %d, column %d: non-numeric cell %r" % (lineno, col, cell)) from None
    if not math.isfinite(x):
        raise ParseError("line %d, column %d: non-finite value %r" % (lineno, col, cell))
    return x


def parse_csv(text: str) -> RawDataset:
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise EmptyData("no header line") from None
    rows = []
    for lineno, rec in enumerate(reader, 2):
        if not rec or all(not c.strip() for c in rec):
            continue
        if len(rec) != len(header):
            raise ParseError("line %d: %d cells, header has %d" % (lineno, len(rec), len(header)))
        rows.append([_parse_float(c.strip(), lineno, k + 1) for k, c in enumerate(rec)])
    if not rows:
        raise EmptyData("no data rows")
    return RawDataset(tuple(header), np.array(rows, dtype=float))


def load_csv(path) -> RawDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_csv(fh.read())


def relabel(raw: RawDataset) -> Tuple[DiscreteDataset, List[ValueMap]]:
    """Replace each column's values by their rank among the column's distinct values."""
    cols, maps = [], []
    for k in range(raw.n):
        uniq, inv = np.unique(raw.rows[:, k], return_inverse=True)
        cols.append(inv.reshape(-1) + 1)
        maps.append(ValueMap(tuple(float(u) for u in uniq)))
    values = np.column_stack(cols) if cols else np.zeros((raw.m, 0), dtype=np.int64)
    return DiscreteDataset(values, tuple(vm.cardinality for vm in maps), raw.names), maps


# ---------------------------------------------------------------- counting

def parent_config_count(parents: Sequence[int], cardinalities: Sequence[int]) -> int:
    return int(np.prod([cardinalities[p - 1] for p in parents], dtype=np.int64))


def parent_config_index(values: np.ndarray, parents: Sequence[int], cardinalities: Sequence[int]) -> np.ndarray:
    """0-based mixed-radix configuration index of each row (lowest parent fastest)."""
    idx = np.zeros(values.shape[0], dtype=np.int64)
    stride = 1
    for p in parents:
        idx += (values[:, p - 1] - 1) * stride
        stride *= cardinalities[p - 1]
    return idx


def node_counts(data: DiscreteDataset, i: int, parents: Sequence[int]) -> np.ndarray:
    cards = data.cardinalities
    q = parent_config_count(parents, cards)
    r = cards[i - 1]
    j = parent_config_index(data.values, parents, cards)
    flat = np.bincount(j * r + (data.values[:, i - 1] - 1), minlength=q * r)
    return flat.reshape(q, r)


def counts(data: DiscreteDataset, dag: Dag) -> CountTable:
    if dag.n != data.n:
        raise SizeMismatch("DAG has %d nodes, data has %d columns" % (dag.n, data.n))
    return CountTable(tuple(node_counts(data, i, dag.parents_of(i)) for i in range(1, dag.n + 1)), data.m)


# ---------------------------------------------------------------- sampling

def sample(spec: BnSpec, m: int, seed: int) -> DiscreteDataset:
    """Forward-sample ``m`` rows.

    Uniforms are drawn as one ``(m, n)`` block in row-major order; column
    ``t`` feeds the ``t``-th node of the topological order.
    """
    if m < 1:
        raise EmptyData("m must be >= 1")
    dag, cards = spec.dag, spec.cardinalities
    order = dag.topological_order()
    u = make_rng(seed).random((m, dag.n))
    values = np.zeros((m, dag.n), dtype=np.int64)
    for t, i in enumerate(order):
        j = parent_config_index(values, dag.parents_of(i), cards)
        cum = np.cumsum(spec.cpt[i - 1], axis=1)
        k = (u[:, t, None] >= cum[j]).sum(axis=1)
        values[:, i - 1] = np.minimum(k, cards[i - 1] - 1) + 1
    return DiscreteDataset(values, cards, spec.names)


def bn_joint(spec: BnSpec) -> JointTable:
    """Exact joint distribution of all nodes of ``spec``."""
    dag, cards = spec.dag, spec.cardinalities
    n = dag.n
    p = np.ones(cards)
    for i in range(1, n + 1):
        pars = dag.parents_of(i)
        # cpt reshaped to axes (parents reversed..., node) -> reorder to node order
        shape = [cards[q - 1] for q in reversed(pars)] + [cards[i - 1]]
        t = spec.cpt[i - 1].reshape(shape)
        axes_in = list(reversed(pars)) + [i]
        t = np.transpose(t, np.argsort(axes_in))
        full = [1] * n
        for a in sorted(axes_in):
            full[a - 1] = cards[a - 1]
        p = p * t.reshape(full)
    return JointTable(tuple(range(1, n + 1)), p)


# ---------------------------------------------------------------- explosion

def _check_explosion(card, spec):
    if len(spec.groups) != card:
        raise SpecMismatch("explosion lists %d groups for a node of cardinality %d" % (len(spec.groups), card))


def explode(data: DiscreteDataset, spec: ExplosionSpec, seed: int) -> DiscreteDataset:
    """Replace each value of ``spec.node`` by a random member of its group."""
    node = spec.node
    if not 1 <= node <= data.n:
        raise SpecMismatch("explosion node %d out of range" % node)
    _check_explosion(data.cardinalities[node - 1], spec)
    col = data.column(node)
    u = make_rng(seed, jumps=1).random(data.m)
    out = np.empty_like(col)
    for v, (g, off) in enumerate(zip(spec.groups, spec.offsets), 1):
        rows = col == v
        cum = np.cumsum(g)
        k = np.minimum((u[rows, None] >= cum).sum(axis=1), len(g) - 1)
        out[rows] = off + k + 1
    return data.with_column(node, out, spec.new_cardinality)


def implode(data: DiscreteDataset, spec: ExplosionSpec) -> DiscreteDataset:
    """Map exploded values back to their original values."""
    back = spec.group_of()
    col = back[data.column(spec.node) - 1]
    return data.with_column(spec.node, col, len(spec.groups))


def joint_table(data: DiscreteDataset, vars: Sequence[int]) -> JointTable:
    vars = tuple(int(v) for v in vars)
    if not vars:
        raise SizeMismatch("joint_table needs a nonempty variable subset")
    cards = [data.cardinalities[v - 1] for v in vars]
    flat = np.zeros(data.m, dtype=np.int64)
    for v, c in zip(vars, cards):
        flat = flat * c + (data.values[:, v - 1] - 1)
    cnt = np.bincount(flat, minlength=int(np.prod(cards)))
    return JointTable(vars, (cnt / data.m).reshape(cards))


def explode_joint(joint: JointTable, spec: ExplosionSpec) -> JointTable:
    if spec.node not in joint.vars:
        raise SpecMismatch("node %d is not a variable of the joint" % spec.node)
    axis = joint.vars.index(spec.node)
    _check_explosion(joint.p.shape[axis], spec)
    back = spec.group_of() - 1
    q = np.concatenate([np.asarray(g) for g in spec.groups])
    shape = [1] * joint.p.ndim
    shape[axis] = len(q)
    p = np.take(joint.p, back, axis=axis) * q.reshape(shape)
    return JointTable(joint.vars, p)


# ---------------------------------------------------------------- JSON files

def load_bnspec(path) -> BnSpec:
    return bnspec_from_dict(json.loads(Path(path).read_text()))


def bnspec_from_dict(doc: dict) -> BnSpec:
    """Build a :class:`BnSpec` from the JSON document layout described in the README."""
    try:
        nodes = doc["nodes"]
        names = tuple(str(nd.get("name", "X%d" % (k + 1))) for k, nd in enumerate(nodes))
        cards = tuple(int(nd["cardinality"]) for nd in nodes)
        dag = new_dag(len(nodes), [tuple(e) for e in doc.get("edges", [])])
        tables = [np.full((parent_config_count(dag.parents_of(i), cards), cards[i - 1]), np.nan)
                  for i in range(1, dag.n + 1)]
        for row in doc["cpt"]:
            i, j = int(row["node"]), int(row["config"])
            tables[i - 1][j - 1] = row["probs"]
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        if isinstance(exc, SpecMismatch):
            raise
        raise SpecMismatch("malformed BnSpec document: %s" % exc) from None
    for i, t in enumerate(tables, 1):
        if np.isnan(t).any():
            raise SpecMismatch("CPT of node %d is missing rows" % i)
    return BnSpec(dag, cards, tuple(tables), names)


def bnspec_to_dict(spec: BnSpec) -> dict:
    names = spec.names or tuple("X%d" % (i + 1) for i in range(spec.dag.n))
    return {
        "nodes": [{"name": nm, "cardinality": c} for nm, c in zip(names, spec.cardinalities)],
        "edges": [list(e) for e in spec.dag.edges],
        "cpt": [{"node": i, "config": j, "probs": [float(x) for x in row]}
                for i, t in enumerate(spec.cpt, 1) for j, row in enumerate(t, 1)],
    }


def load_explosion(path) -> ExplosionSpec:
    doc = json.loads(Path(path).read_text())
    try:
        return ExplosionSpec(int(doc["node"]), tuple(tuple(g) for g in doc["groups"]))
    except (KeyError, TypeError) as exc:
        raise SpecMismatch("malformed explosion document: %s" % exc) from None


def explosion_to_dict(spec: ExplosionSpec) -> dict:
    return {"node": spec.node, "groups": [list(g) for g in spec.groups]}
