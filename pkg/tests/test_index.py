import math

import numpy as np
import pytest

from seaidx import (
    EmptyTree,
    GenSpec,
    UnsupportedSummarization,
    approx_query,
    build,
    dea_scale,
    dft_summarize_rows,
    euclidean,
    exact_query_bruteforce,
    exact_query_pruned,
    gen_queries,
    gen_randwalk,
    generate_dataset,
    ideal_tightness_curve,
    leaf_compactness,
    paa_rows,
    sax_words_for,
    tightness,
)


def _tree_for(dataset, h=100, l=16, bits=8, kind="paa"):
    return build(sax_words_for(dataset, l, bits), bits, h, dataset.m,
                 summarization_kind=kind)


def test_single_root_leaf_when_small():
    ds = gen_randwalk(50, 64, seed=50)
    tree = _tree_for(ds, h=100)
    assert tree.root.is_leaf
    assert tree.stats() == {"leaves": 1, "max_leaf": 50, "unsplittable": 0, "depth": 0}


def test_complementary_first_bits_split_at_depth_one():
    words = np.array([[0, 0, 0, 0], [255, 255, 255, 255]], dtype=np.uint8)
    tree = build(words, 8, 1, 64)
    stats = tree.stats()
    assert stats["leaves"] == 2
    assert stats["depth"] == 1


def test_leaf_partition_and_prefix_membership():
    ds = gen_randwalk(10_000, 64, seed=51)
    tree = _tree_for(ds, h=100)
    words = sax_words_for(ds, 16, 8)
    seen = np.zeros(10_000, dtype=bool)
    for leaf in tree.leaves():
        assert not seen[leaf.ids].any()
        seen[leaf.ids] = True
        # independent re-filter: every member's word matches the leaf prefix
        for j in range(16):
            level = int(leaf.levels[j])
            if level:
                tops = words[leaf.ids, j] >> (8 - level)
                assert np.all(tops == leaf.prefix[j])
    assert seen.all()


def test_leaf_size_respected_unless_unsplittable():
    ds = gen_randwalk(5000, 64, seed=52)
    tree = _tree_for(ds, h=40)
    for leaf in tree.leaves():
        assert len(leaf) <= 40 or leaf.unsplittable


def test_unsplittable_absorbs_duplicates():
    base = gen_randwalk(1, 32, seed=53).data[0]
    data = np.tile(base, (30, 1))
    words = sax_words_for(data, 16, 8)
    tree = build(words, 8, 4, 32)
    stats = tree.stats()
    assert stats["unsplittable"] == 1
    assert stats["max_leaf"] == 30
    assert "unsplittable=1" in tree.stats_line()


def test_build_rejects_empty():
    with pytest.raises(EmptyTree):
        build(np.zeros((0, 16), dtype=np.uint8), 8, 10, 64)


def test_approx_query_finds_indexed_series():
    ds = gen_randwalk(2000, 64, seed=54)
    tree = _tree_for(ds, h=64)
    q = ds.data[123].astype(np.float64)
    report = approx_query(tree, ds.data, q, budget=64)
    assert report.bsf_distance == 0.0
    assert report.answer_id == 123
    report.exact_distance = 0.0
    assert report.tightness == 1.0  # 0/0 defined as 1


def test_approx_query_budget_n_is_exact():
    ds = gen_randwalk(1500, 64, seed=55)
    tree = _tree_for(ds, h=50)
    qs = gen_queries(GenSpec("randwalk", 1500, 64, 55), 10)
    for q in qs.data:
        _, exact, _ = exact_query_bruteforce(ds.data, q)
        report = approx_query(tree, ds.data, q, budget=1500)
        assert math.isclose(report.bsf_distance, exact, rel_tol=1e-12)


def test_trajectory_monotone():
    ds = gen_randwalk(3000, 64, seed=56)
    tree = _tree_for(ds, h=50)
    q = gen_queries(GenSpec("randwalk", 3000, 64, 56), 1).data[0]
    report = approx_query(tree, ds.data, q, budget=1200)
    counts = [c for c, _ in report.trajectory]
    bsfs = [b for _, b in report.trajectory]
    assert np.all(np.diff(counts) > 0)
    assert np.all(np.diff(bsfs) <= 0)
    assert counts[-1] == 1200


def test_mean_tightness_nondecreasing_in_budget():
    ds = gen_randwalk(4000, 64, seed=57)
    tree = _tree_for(ds, h=80)
    qs = gen_queries(GenSpec("randwalk", 4000, 64, 57), 30)
    means = []
    for budget in (40, 400, 4000):
        vals = []
        for q in qs.data:
            _, exact, _ = exact_query_bruteforce(ds.data, q)
            rep = approx_query(tree, ds.data, q, budget)
            vals.append(tightness(exact, rep.bsf_distance))
            assert 0 < vals[-1] <= 1 + 1e-12
        means.append(np.mean(vals))
    assert means[0] <= means[1] + 1e-12 <= means[2] + 1e-12
    assert math.isclose(means[2], 1.0, rel_tol=1e-12)


def test_exact_pruned_matches_bruteforce():
    for kind, seed in (("randwalk", 58), ("f5", 59)):
        ds = generate_dataset(GenSpec(kind, 3000, 64, seed))
        tree = _tree_for(ds, h=60)
        qs = gen_queries(GenSpec(kind, 3000, 64, seed), 20)
        examined = []
        for q in qs.data:
            bid, bdist, _ = exact_query_bruteforce(ds.data, q)
            pid, pdist, nexam = exact_query_pruned(tree, ds.data, q)
            assert (bid, bdist) == (pid, pdist)
            examined.append(nexam)
        assert np.mean(examined) < 3000  # pruning prunes


def test_exact_pruned_query_in_dataset():
    ds = gen_randwalk(500, 64, seed=60)
    tree = _tree_for(ds, h=40)
    pid, pdist, _ = exact_query_pruned(tree, ds.data, ds.data[77].astype(np.float64))
    assert (pid, pdist) == (77, 0.0)


def test_exact_pruned_rejects_dea_tree():
    ds = gen_randwalk(200, 64, seed=61)
    dea = dea_scale(dft_summarize_rows(ds.data, 16), 64)
    from seaidx import sax_from_paa, unit_scale
    words = sax_from_paa(unit_scale(dea, True, 64), 8)
    tree = build(words, 8, 50, 64, summarization_kind="dea")
    with pytest.raises(UnsupportedSummarization):
        exact_query_pruned(tree, ds.data, ds.data[0])


def test_dea_tree_requires_query_summary():
    ds = gen_randwalk(200, 64, seed=62)
    dea = dea_scale(dft_summarize_rows(ds.data, 16), 64)
    from seaidx import sax_from_paa, unit_scale
    words = sax_from_paa(unit_scale(dea, True, 64), 8)
    tree = build(words, 8, 50, 64, summarization_kind="dea")
    with pytest.raises(UnsupportedSummarization):
        approx_query(tree, ds.data, ds.data[0], budget=10)
    # with the summary supplied it works and finds the series itself
    rep = approx_query(tree, ds.data, ds.data[0], budget=200,
                       query_summary=unit_scale(dea[0], True, 64))
    assert rep.bsf_distance == 0.0


def test_tightness_edge_cases():
    assert tightness(0.0, 0.0) == 1.0
    assert tightness(1.0, 2.0) == 0.5


def test_leaf_compactness_cases():
    ds = gen_randwalk(4, 32, seed=63)
    dup = np.tile(ds.data[0], (5, 1))
    words = sax_words_for(dup, 16, 8)
    tree = build(words, 8, 10, 32)
    assert leaf_compactness(tree, dup) == 0.0

    pair = ds.data[:2]
    tree2 = build(sax_words_for(pair, 16, 8), 8, 10, 32)
    expect = euclidean(pair[0], pair[1])
    assert math.isclose(leaf_compactness(tree2, pair), expect, rel_tol=1e-12)


def test_leaf_compactness_pinned_oracle():
    rng = np.random.Generator(np.random.Philox(key=77))
    block = rng.standard_normal((50, 32))
    tree = build(np.zeros((50, 16), dtype=np.uint8), 8, 100, 32)
    assert math.isclose(leaf_compactness(tree, block), 8.065676125310832,
                        rel_tol=1e-12)


def test_ideal_tightness_budget_n_and_identity():
    ds = gen_randwalk(300, 32, seed=64)
    qs = gen_queries(GenSpec("randwalk", 300, 32, 64), 10)
    paa_b = paa_rows(ds.data, 8)
    paa_q = paa_rows(qs.data, 8)
    curve = ideal_tightness_curve(ds.data, qs.data, paa_b, paa_q, [300])
    assert np.allclose(curve, 1.0)
    # summarization = the series themselves: perfect at every budget
    curve_id = ideal_tightness_curve(ds.data, qs.data, ds.data, qs.data, [1, 5, 300])
    assert np.allclose(curve_id, 1.0)
