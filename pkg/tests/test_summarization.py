import math

import numpy as np
import pytest

from seaidx import (
    BadBits,
    BadBudget,
    BadSegmentCount,
    DegenerateEmbedding,
    ShapeMismatch,
    breakpoints,
    dea_scale,
    dft_reconstruct,
    dft_summarize,
    dft_summarize_rows,
    euclidean,
    gen_randwalk,
    load_sax,
    load_summaries,
    mindist,
    paa,
    paa_distance,
    paa_rows,
    reduce_cardinality,
    save_sax,
    save_summaries,
    sax_from_paa,
    unit_scale,
    znormalize,
)
from seaidx.summarization import mindist_batch


# --- breakpoints -----------------------------------------------------------

def test_breakpoints_quartiles():
    bp = breakpoints(2)
    assert np.allclose(bp, [-0.6744897501960817, 0.0, 0.6744897501960817], atol=1e-9)


def test_breakpoints_shape_and_symmetry():
    for b in range(1, 9):
        bp = breakpoints(b)
        assert bp.shape == (2 ** b - 1,)
        assert np.all(np.diff(bp) > 0)
        assert np.allclose(bp, -bp[::-1], atol=1e-12)


# --- paa --------------------------------------------------------------------

def test_paa_identity_segmentation():
    x = np.array([3.0, -1.0, 2.0, 0.5])
    assert np.allclose(paa(x, 4), x)


def test_paa_constant_series():
    assert np.allclose(paa(np.full(12, 2.5), 3), [2.5, 2.5, 2.5])


def test_paa_hand_example():
    assert np.allclose(paa(np.arange(8.0), 4), [0.5, 2.5, 4.5, 6.5])


def test_paa_uneven_segments_long_first():
    # m=7, l=3 -> segments of 3,2,2
    x = np.arange(7.0)
    assert np.allclose(paa(x, 3), [1.0, 3.5, 5.5])


def test_paa_bad_segment_count():
    with pytest.raises(BadSegmentCount):
        paa(np.arange(4.0), 5)
    with pytest.raises(BadSegmentCount):
        paa_rows(np.zeros((2, 4)), 0)


def test_paa_distance_scale():
    rng = np.random.Generator(np.random.Philox(key=11))
    a, b = rng.standard_normal((2, 256))
    pa, pb = paa(a, 16), paa(b, 16)
    assert math.isclose(paa_distance(pa, pb, 256), 4.0 * euclidean(pa, pb), rel_tol=1e-12)
    assert paa_distance(pa, pa, 256) == 0.0
    # l = m: plain Euclidean
    assert math.isclose(paa_distance(a, b, 256), euclidean(a, b), rel_tol=1e-12)


def test_paa_lower_bounds_euclidean():
    rng = np.random.Generator(np.random.Philox(key=12))
    data = rng.standard_normal((200, 64))
    reduced = paa_rows(data, 8)
    for _ in range(500):
        i, j = rng.integers(0, 200, size=2)
        d = euclidean(data[i], data[j])
        dp = paa_distance(reduced[i], reduced[j], 64)
        assert dp <= d + 1e-9


# --- sax ---------------------------------------------------------------------

def test_sax_sign_split():
    assert sax_from_paa(np.array([-0.3]), 1)[0] == 0
    assert sax_from_paa(np.array([0.3]), 1)[0] == 1


def test_sax_zero_maps_to_upper_middle():
    word = sax_from_paa(np.zeros(16), 2)
    assert np.all(word == 2)  # breakpoint hit maps to the higher symbol


def test_sax_quartile_example():
    word = sax_from_paa(np.array([-2.0, -0.1, 0.1, 2.0]), 2)
    assert word.tolist() == [0, 1, 2, 3]


def test_sax_monotone():
    rng = np.random.Generator(np.random.Philox(key=13))
    vals = np.sort(rng.standard_normal(100))
    for b in (1, 3, 8):
        word = sax_from_paa(vals, b)
        assert np.all(np.diff(word.astype(int)) >= 0)


def test_reduce_cardinality_identity_and_top_bit():
    word = np.array([6], dtype=np.uint8)  # binary 110 at b=3
    assert reduce_cardinality(word, 3, [3])[0] == 6
    assert reduce_cardinality(word, 3, [1])[0] == 1


def test_reduce_cardinality_matches_integer_division():
    rng = np.random.Generator(np.random.Philox(key=14))
    word = rng.integers(0, 256, size=32).astype(np.uint8)
    assert np.array_equal(reduce_cardinality(word, 8, np.full(32, 4)),
                          word // 16)


def test_reduce_cardinality_bad_bits():
    with pytest.raises(BadBits):
        reduce_cardinality(np.array([1], dtype=np.uint8), 3, [4])


# --- mindist -----------------------------------------------------------------

def test_mindist_zero_inside_regions():
    values = np.array([-1.0, 0.2, 0.8, 0.0])
    word = sax_from_paa(values, 3)
    assert mindist(values, word, np.full(4, 3), 3, 16) == 0.0


def test_mindist_lower_bounds_true_distance():
    rng = np.random.Generator(np.random.Philox(key=15))
    data = rng.standard_normal((200, 64))
    reduced = paa_rows(data, 8)
    words = sax_from_paa(reduced, 8)
    full_bits = np.full(8, 8)
    half_bits = np.full(8, 4)
    for _ in range(1000):
        qi, ci = rng.integers(0, 200, size=2)
        d = euclidean(data[qi], data[ci])
        md_full = mindist(reduced[qi], words[ci], full_bits, 8, 64)
        md_half = mindist(reduced[qi], reduce_cardinality(words[ci], 8, half_bits),
                          half_bits, 8, 64)
        assert md_full <= d + 1e-9
        assert md_half <= md_full + 1e-9  # coarser regions never increase it


def test_mindist_batch_matches_scalar():
    rng = np.random.Generator(np.random.Philox(key=16))
    q = rng.standard_normal(8)
    words = sax_from_paa(rng.standard_normal((5, 8)), 8)
    levels = np.tile(np.array([8, 8, 4, 4, 2, 2, 1, 0]), (5, 1))
    words = reduce_cardinality(words, 8, levels)
    batch = mindist_batch(q, words, levels, 8, 64)
    for i in range(5):
        assert math.isclose(batch[i], mindist(q, words[i], levels[i], 8, 64),
                            rel_tol=1e-12)


def test_mindist_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        mindist(np.zeros(3), np.zeros(4, dtype=np.uint8), np.full(4, 1), 1, 8)


# --- dea scaling --------------------------------------------------------------

def test_dea_scale_identity_when_m_equals_l():
    e = znormalize(np.array([0.0, 1.0, 2.0, 3.0]))
    assert np.allclose(dea_scale(e, 4), e, atol=1e-12)


def test_dea_scale_two_point():
    out = dea_scale(np.array([1.0, -1.0]), 16)
    assert np.allclose(out, [math.sqrt(8), -math.sqrt(8)], atol=1e-12)
    assert math.isclose((out ** 2).sum(), 16.0, rel_tol=1e-12)


def test_dea_scale_sum_of_squares():
    rng = np.random.Generator(np.random.Philox(key=17))
    e = rng.standard_normal(16) * 3 + 2
    out = dea_scale(e, 256)
    assert math.isclose(float((out ** 2).sum()), 256.0, rel_tol=1e-5)


def test_dea_scale_dataset_sos():
    rng = np.random.Generator(np.random.Philox(key=18))
    block = rng.standard_normal((100, 16))
    out = dea_scale(block, 128)
    assert math.isclose(float((out ** 2).sum()), 100 * 128, rel_tol=1e-5)


def test_dea_scale_degenerate():
    with pytest.raises(DegenerateEmbedding):
        dea_scale(np.full(16, 3.0), 256)


def test_unit_scale_inverts_dea_scale():
    rng = np.random.Generator(np.random.Philox(key=19))
    e = rng.standard_normal((7, 16))
    scaled = dea_scale(e, 256)
    back = unit_scale(scaled, True, 256)
    assert np.allclose((back ** 2).sum(axis=1), 16.0, rtol=1e-10)
    assert np.allclose(unit_scale(e, False, 256), e)


# --- dft baseline --------------------------------------------------------------

def test_dft_single_tone():
    t = np.arange(64)
    x = znormalize(np.cos(2 * np.pi * t / 64))
    v = dft_summarize(x, 2)
    energy = v[0] ** 2 + v[1] ** 2
    full = np.abs(np.fft.rfft(x)) ** 2
    assert energy / full.sum() > 0.999


def test_dft_shift_preserves_magnitudes():
    rng = np.random.Generator(np.random.Philox(key=20))
    x = znormalize(rng.standard_normal(64))
    y = np.roll(x, 17)
    vx = dft_summarize(x, 16)
    vy = dft_summarize(y, 16)
    mags_x = np.hypot(vx[0::2], vx[1::2])
    mags_y = np.hypot(vy[0::2], vy[1::2])
    assert np.allclose(mags_x, mags_y, atol=1e-9)


def test_dft_roundtrip_full_spectrum():
    rng = np.random.Generator(np.random.Philox(key=21))
    x = znormalize(rng.standard_normal(32))
    v = dft_summarize(x, 32)
    back = dft_reconstruct(v, 32)
    assert np.abs(back - x).max() < 1e-4


def test_dft_bad_budget():
    with pytest.raises(BadBudget):
        dft_summarize(np.zeros(16), 7)
    with pytest.raises(BadBudget):
        dft_summarize(np.zeros(16), 18)


def test_dft_rows_matches_single():
    rng = np.random.Generator(np.random.Philox(key=22))
    data = rng.standard_normal((5, 32))
    block = dft_summarize_rows(data, 8)
    for i in range(5):
        assert np.allclose(block[i], dft_summarize(data[i], 8))


# --- acceptance-grade lower-bound sweep ---------------------------------------

def test_paa_lower_bound_randwalk_sweep():
    ds = gen_randwalk(300, 64, seed=23)
    reduced = paa_rows(ds.data, 16)
    rng = np.random.Generator(np.random.Philox(key=24))
    pairs = rng.integers(0, 300, size=(2000, 2))
    d = np.sqrt(((ds.data[pairs[:, 0]].astype(np.float64)
                  - ds.data[pairs[:, 1]].astype(np.float64)) ** 2).sum(axis=1))
    dp = 2.0 * np.sqrt(((reduced[pairs[:, 0]] - reduced[pairs[:, 1]]) ** 2).sum(axis=1))
    assert np.all(dp <= d + 1e-9)


# --- file formats ---------------------------------------------------------------

def test_summary_file_roundtrip(tmp_path):
    rng = np.random.Generator(np.random.Philox(key=25))
    values = dea_scale(rng.standard_normal((9, 16)), 128).astype(np.float32)
    save_summaries(values, tmp_path / "emb.bin", source_length=128, scaled=True,
                   kind="dft-dea")
    back, info = load_summaries(tmp_path / "emb.bin")
    assert np.array_equal(back, values)
    assert info == {"n": 9, "l": 16, "source_m": 128, "scaled": True, "kind": "dft-dea"}


def test_sax_file_roundtrip(tmp_path):
    rng = np.random.Generator(np.random.Philox(key=26))
    words = rng.integers(0, 256, size=(11, 16)).astype(np.uint8)
    save_sax(words, 8, tmp_path / "w.sax")
    back, bits = load_sax(tmp_path / "w.sax")
    assert bits == 8
    assert np.array_equal(back, words)
