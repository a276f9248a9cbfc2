#!/usr/bin/env python3
# Walkthrough: interleaved sortable keys and equal-interval sampling,
# including the leaf-coverage comparison against uniform sampling.

import numpy as np

import seaidx as sx

# bit interleaving: all most-significant bits first, then the second bits...
word = np.array([0b110, 0b101, 0b011, 0b010], dtype=np.uint8)
key = sx.invsax(word, 3)
print("word     :", [format(s, "03b") for s in word])
print("key bits :", "".join(format(byte, "08b") for byte in key)[:12])
print("roundtrip:", sx.sax_from_invsax(key, 4, 3).tolist())

# equal-interval sampling over the sorted key order
ds = sx.generate_dataset(sx.GenSpec("f10", 20_000, 256, seed=3))
picks = sx.seasam(ds, 200)
print("\nseasam picked", picks.size, "ids; first ten:", picks[:10].tolist())

# coverage experiment: distinct index leaves hit by each strategy
tree = sx.build(sx.sax_words_for(ds, 16, 8), 8, 100, 256)
print("index:", tree.stats_line())
reports = sx.leaf_coverage_experiment(tree, ds, sample_sizes=[100, 1000],
                                      seeds=[0, 1, 2])
for r in reports:
    print(r.line())

seasam_cov = {r.config["n_prime"]: r.value for r in reports
              if r.config["strategy"] == "seasam"}
for n_prime in (100, 1000):
    uniform = [r.value for r in reports
               if r.config["strategy"] == "uniform" and r.config["n_prime"] == n_prime]
    print(f"n'={n_prime}: seasam {seasam_cov[n_prime]:.0f} vs "
          f"uniform mean {np.mean(uniform):.1f}")
