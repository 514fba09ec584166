"""Sample a three-node fork and rank every candidate structure.

All 25 DAGs on three nodes are scored with AIC, BIC and MDL. The three
DAGs sharing the fork's skeleton and lack of v-structures tie, and that
class wins under every criterion.

    python3 demos/recover_fork.py [m] [seed]
"""
import sys

from bnmdl.dataset import sample
from bnmdl.graph import enumerate_dags
from bnmdl.instances import fork_spec
from bnmdl.scoring import recover

m = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

spec = fork_spec()
print("generating graph: %s, m = %d, seed = %d\n" % (spec.dag, m, seed))
data = sample(spec, m, seed)

report = recover(data, enumerate_dags(3), "mdl")
print(report.to_text())

# a small sample tells a different story: penalties dominate and sparser graphs can win
small = sample(spec, 30, seed)
for crit in ("aic", "bic", "mdl"):
    r = recover(small, enumerate_dags(3), crit)
    print("m = 30, %s winners: %s" % (crit.upper(), "; ".join(str(d) or "(empty)" for d in r.winner_dags())))
