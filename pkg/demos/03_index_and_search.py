#!/usr/bin/env python3
# Walkthrough: building the tree, budget-limited approximate queries with
# best-so-far trajectories, and MINDIST-pruned exact search.

import numpy as np

import seaidx as sx

spec = sx.GenSpec("randwalk", 20_000, 256, seed=11)
ds = sx.generate_dataset(spec)
queries = sx.gen_queries(spec, 20)

tree = sx.build(sx.sax_words_for(ds, 16, 8), 8, 100, 256)
print("index:", tree.stats_line())

q = queries.data[0].astype(np.float64)
_, exact, _ = sx.exact_query_bruteforce(ds.data, q)

print("\nBSF trajectory (budget 2000):")
report = sx.approx_query(tree, ds.data, q, budget=2000)
report.exact_distance = exact
for examined, bsf in report.trajectory[:8]:
    print(f"  examined={examined:5d}  bsf={bsf:.4f}")
print("  ...")
print(report.line())

print("\nmean tightness vs budget (20 queries):")
exacts = [sx.exact_query_bruteforce(ds.data, qq.astype(np.float64))[1]
          for qq in queries.data]
for budget in (100, 500, 2000, 20_000):
    vals = [sx.tightness(exacts[i],
                         sx.approx_query(tree, ds.data,
                                         queries.data[i].astype(np.float64),
                                         budget).bsf_distance)
            for i in range(queries.n)]
    print(f"  budget={budget:6d}  mean tightness={np.mean(vals):.4f}")

print("\npruned exact search agrees with brute force and skips most series:")
for i in range(5):
    qq = queries.data[i].astype(np.float64)
    bid, bdist, _ = sx.exact_query_bruteforce(ds.data, qq)
    pid, pdist, nexam = sx.exact_query_pruned(tree, ds.data, qq)
    print(f"  q{i}: id {bid} == {pid}, dist {bdist:.4f}, examined {nexam}/{ds.n}")

print("\nleaf compactness (mean pairwise distance within leaves):",
      f"{sx.leaf_compactness(tree, ds.data):.4f}")
