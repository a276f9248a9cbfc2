#!/usr/bin/env python3
# Walkthrough: series generation, z-normalization, PAA/SAX, and the
# lower-bounding guarantees that make the summaries index-worthy.

import numpy as np

import seaidx as sx

ds = sx.gen_randwalk(n=1000, m=256, seed=7)
print(f"dataset: n={ds.n} m={ds.m} znormalized={ds.znormalized}")
print("per-series mean/std:",
      float(np.abs(ds.data.mean(axis=1)).max()),
      float(np.abs(ds.data.std(axis=1) - 1).max()))

# PAA: 16 segment means per series; distances need the sqrt(m/l) factor
paa = sx.paa_rows(ds.data, 16)
a, b = ds.data[0], ds.data[1]
print("\ntrue distance        :", sx.euclidean(a, b))
print("PAA distance (scaled):", sx.paa_distance(paa[0], paa[1], 256))

# SAX: quantize PAA values against N(0,1) equal-probability breakpoints
words = sx.sax_from_paa(paa, 8)
print("\nSAX word of series 0 :", words[0].tolist())
print("breakpoints (2 bits) :", np.round(sx.breakpoints(2), 4).tolist())

# cardinality reduction keeps the most-significant bits
coarse = sx.reduce_cardinality(words[0], 8, np.full(16, 2))
print("reduced to 2 bits    :", coarse.tolist())

# MINDIST lower-bounds the true distance to anything sharing the word
md = sx.mindist(paa[0], words[1], np.full(16, 8), 8, 256)
print("\nmindist vs true      :", md, "<=", sx.euclidean(a, b))

# sanity sweep: the bounds hold on every random pair
rng = np.random.default_rng(0)
ok = 0
for _ in range(2000):
    i, j = rng.integers(0, ds.n, 2)
    d = sx.euclidean(ds.data[i], ds.data[j])
    ok += sx.paa_distance(paa[i], paa[j], 256) <= d + 1e-9
    ok += sx.mindist(paa[i], words[j], np.full(16, 8), 8, 256) <= d + 1e-9
print("lower bounds held    :", ok, "of", 4000)
