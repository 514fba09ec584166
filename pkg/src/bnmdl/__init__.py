"""Score Bayesian network structures and discretize nodes by minimum description length."""

from .errors import (BnMdlError, CycleError, DomainError, EmptyData, InvalidEdge, OverlapError,
                     ParseError, PolicyMismatch, SizeMismatch, SpecMismatch, TooLarge)
from .graph import Dag, EquivalenceKey, enumerate_dags, equivalence_key, markov_equivalent, new_dag
from .dataset import (BnSpec, CountTable, DiscreteDataset, ExplosionSpec, JointTable, RawDataset, ValueMap,
                      bn_joint, counts, explode, explode_joint, joint_table, load_csv, relabel, sample)
from .scoring import (ScoreReport, ThetaTable, dl_data, dl_net, log_likelihood, mle_theta, recover,
                      score_network)
from .discretization import (LocalScore, PenaltyCurve, Policy, apply_policy, cycle_discretize, dl_dp,
                             dl_local, dl_rec, dl_star, entropy_h, exhaustive_search, info_sum,
                             mutual_information, penalty_curve, top_down_search)

__version__ = "0.1.0"

__all__ = [
    "BnMdlError",
    "CycleError",
    "DomainError",
    "EmptyData",
    "InvalidEdge",
    "OverlapError",
    "ParseError",
    "PolicyMismatch",
    "SizeMismatch",
    "SpecMismatch",
    "TooLarge",
    "Dag",
    "EquivalenceKey",
    "enumerate_dags",
    "equivalence_key",
    "markov_equivalent",
    "new_dag",
    "BnSpec",
    "CountTable",
    "DiscreteDataset",
    "ExplosionSpec",
    "JointTable",
    "RawDataset",
    "ValueMap",
    "bn_joint",
    "counts",
    "explode",
    "explode_joint",
    "joint_table",
    "load_csv",
    "relabel",
    "sample",
    "ScoreReport",
    "ThetaTable",
    "dl_data",
    "dl_net",
    "log_likelihood",
    "mle_theta",
    "recover",
    "score_network",
    "LocalScore",
    "PenaltyCurve",
    "Policy",
    "apply_policy",
    "cycle_discretize",
    "dl_dp",
    "dl_local",
    "dl_rec",
    "dl_star",
    "entropy_h",
    "exhaustive_search",
    "info_sum",
    "mutual_information",
    "penalty_curve",
    "top_down_search",
]
