"""Ready-made networks and exploded instances with a known correct discretization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .dataset import BnSpec, DiscreteDataset, ExplosionSpec, JointTable, bn_joint, explode, explode_joint, sample
from .discretization import Policy
from .graph import Dag, new_dag

REFERENCE_GROUPS = ((1 / 3, 2 / 3), (2 / 7, 4 / 7, 1 / 7), (1.0,))

# Rows of P(child | parent) for a three-valued parent; pairwise TV distance >= 0.5.
SEPARATED_ROWS = np.array([
    [0.70, 0.20, 0.10],
    [0.20, 0.60, 0.20],
    [0.10, 0.20, 0.70],
])
SEPARATED_ROWS_B = np.array([
    [0.15, 0.15, 0.70],
    [0.60, 0.25, 0.15],
    [0.25, 0.60, 0.15],
])


def reference_explosion(node: int = 1) -> ExplosionSpec:
    """Value 1 -> {1,2}, value 2 -> {3,4,5}, value 3 -> {6}."""
    return ExplosionSpec(node, REFERENCE_GROUPS)


def two_node_spec(marginal=(0.3, 0.4, 0.3), rows=SEPARATED_ROWS) -> BnSpec:
    """Node 1 -> node 2."""
    rows = np.asarray(rows, dtype=float)
    return BnSpec(new_dag(2, [(1, 2)]), (len(marginal), rows.shape[1]),
                  (np.array([marginal], dtype=float), rows))


def fork_spec() -> BnSpec:
    """2 <- 1 -> 3, every node three-valued."""
    return BnSpec(new_dag(3, [(1, 2), (1, 3)]), (3, 3, 3),
                  (np.array([[0.3, 0.4, 0.3]]), SEPARATED_ROWS, SEPARATED_ROWS_B))


def exploded_joint_instance() -> Tuple[JointTable, Dag, ExplosionSpec]:
    """Exact exploded two-node joint; the correct policy is 12|345|6."""
    spec = two_node_spec()
    expl = reference_explosion()
    return explode_joint(bn_joint(spec), expl), spec.dag, expl


def exploded_sample_instance(m: int, seed: int) -> Tuple[DiscreteDataset, Dag, ExplosionSpec]:
    """Sampled two-node data, exploded at node 1 with the same seed."""
    spec = two_node_spec()
    expl = reference_explosion()
    return explode(sample(spec, m, seed), expl, seed), spec.dag, expl


@dataclass
class Instance:
    joint: JointTable
    dag: Dag
    node: int
    explosion: ExplosionSpec
    shape: str

    @property
    def m1(self) -> int:
        return self.explosion.new_cardinality

    @property
    def correct(self) -> Policy:
        return Policy(self.node, self.m1, self.explosion.correct_thresholds())


SHAPES = ("parent", "child", "fork", "collider")


def _separated_rows(rng, n_rows, width, min_tv):
    # adjacent rows must differ, since policies only merge neighbouring values
    while True:
        rows = rng.dirichlet(np.ones(width), size=n_rows)
        tv = 0.5 * np.abs(np.diff(rows, axis=0)).sum(axis=1)
        if n_rows == 1 or tv.min() >= min_tv:
            return rows


def random_groups(m1: int, rng: np.random.Generator) -> Tuple[Tuple[float, ...], ...]:
    """Random split of 1..m1 into consecutive groups with random replacement probabilities."""
    n_groups = int(rng.integers(1, m1 + 1))
    cuts = np.sort(rng.choice(np.arange(1, m1), size=n_groups - 1, replace=False))
    sizes = np.diff(np.concatenate([[0], cuts, [m1]]))
    return tuple(tuple(rng.dirichlet(np.full(s, 2.0))) for s in sizes)


def random_instance(m1: int, rng: np.random.Generator, shape: str = "parent",
                    min_tv: float = 0.2) -> Instance:
    """A random base network exploded exactly at node 1 to ``m1`` values.

    The base conditionals of node 1's neighbours differ between adjacent
    original values by at least ``min_tv`` in total variation, so the
    correct policy is the one separating the explosion groups.
    """
    groups = random_groups(m1, rng)
    b = len(groups)
    px = rng.dirichlet(np.full(b, 5.0))
    if shape in ("parent", "child"):
        card2 = int(rng.integers(2, 5))
        p = px[:, None] * _separated_rows(rng, b, card2, min_tv)
        dag = new_dag(2, [(1, 2)] if shape == "parent" else [(2, 1)])
        joint = JointTable((1, 2), p)
    elif shape == "fork":
        c2, c3 = (int(x) for x in rng.integers(2, 4, size=2))
        r2 = _separated_rows(rng, b, c2, min_tv)
        r3 = rng.dirichlet(np.ones(c3), size=b)
        p = px[:, None, None] * r2[:, :, None] * r3[:, None, :]
        dag = new_dag(3, [(1, 2), (1, 3)])
        joint = JointTable((1, 2, 3), p)
    elif shape == "collider":
        cy, c2 = (int(x) for x in rng.integers(2, 4, size=2))
        py = rng.dirichlet(np.full(cy, 5.0))
        rows = np.stack([_separated_rows(rng, b, c2, min_tv) for _ in range(cy)], axis=1)
        p = px[:, None, None] * py[None, :, None] * rows
        # axes: node 1, node 3 (other parent), node 2 (child)
        dag = new_dag(3, [(1, 2), (3, 2)])
        joint = JointTable((1, 3, 2), p)
    else:
        raise ValueError("unknown shape %r" % shape)
    expl = ExplosionSpec(1, groups)
    return Instance(explode_joint(joint, expl), dag, 1, expl, shape)
