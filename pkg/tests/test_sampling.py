import numpy as np
import pytest

from seaidx import (
    BadSampleSize,
    SampleSet,
    gen_randwalk,
    invsax,
    invsax_keys,
    invsax_order,
    load_sample,
    sax_from_invsax,
    sax_words_for,
    save_sample,
    seasam,
    uniform_sample,
)


def _bitstring_key(word, bits):
    # independent construction: python string formatting, no numpy bit tricks
    cols = [format(int(s), f"0{bits}b") for s in word]
    return "".join(cols[j][i] for i in range(bits) for j in range(len(cols)))


def test_invsax_zero_word():
    key = invsax(np.zeros(8, dtype=np.uint8), 8)
    assert key == bytes(8)


def test_invsax_single_word_is_identity():
    word = np.array([0b1011_0010], dtype=np.uint8)
    assert invsax(word, 8) == bytes([0b1011_0010])


def test_invsax_interleaving_layout():
    # l=4, b=3: significant bits {1,1,0,0}, then {1,0,1,1}, then {0,1,1,0}
    # give symbols [6,5,3,2]; interleaved bit string is 1100 1011 0110
    word = np.array([0b110, 0b101, 0b011, 0b010], dtype=np.uint8)
    key = invsax(word, 3)
    assert key == bytes([0b1100_1011, 0b0110_0000])


def test_invsax_matches_string_oracle():
    rng = np.random.Generator(np.random.Philox(key=31))
    for bits in (1, 3, 8):
        words = rng.integers(0, 1 << bits, size=(50, 16)).astype(np.uint8)
        keys = invsax_keys(words, bits)
        for row in range(50):
            expect = _bitstring_key(words[row], bits)
            got = "".join(format(b, "08b") for b in keys[row])[: 16 * bits]
            assert got == expect


def test_invsax_roundtrip():
    rng = np.random.Generator(np.random.Philox(key=32))
    words = rng.integers(0, 256, size=(500, 16)).astype(np.uint8)
    keys = invsax_keys(words, 8)
    for row in range(500):
        back = sax_from_invsax(keys[row].tobytes(), 16, 8)
        assert np.array_equal(back, words[row])


def test_invsax_significant_bits_dominate():
    # words differing in their first-bit vectors compare by those alone
    hi = np.array([0b100, 0b000], dtype=np.uint8)   # first bits (1, 0)
    lo = np.array([0b011, 0b111], dtype=np.uint8)   # first bits (0, 1), rest all-ones
    key_hi = invsax(hi, 3)
    key_lo = invsax(lo, 3)
    assert key_lo < key_hi  # (0,1) < (1,0) regardless of lower bits


def test_invsax_order_is_stable():
    words = np.zeros((4, 2), dtype=np.uint8)  # all identical keys
    assert invsax_order(words, 8).tolist() == [0, 1, 2, 3]


def test_seasam_full_sample_is_everything():
    ds = gen_randwalk(20, 32, seed=33)
    assert seasam(ds, 20).tolist() == list(range(20))


def test_seasam_single_pick_is_smallest_key():
    ds = gen_randwalk(40, 32, seed=34)
    words = sax_words_for(ds, 16, 8)
    keys = invsax_keys(words, 8)
    expect = min(range(40), key=lambda i: (keys[i].tobytes(), i))
    assert seasam(ds, 1).tolist() == [expect]


def test_seasam_matches_independent_sort_oracle():
    ds = gen_randwalk(100, 64, seed=35)
    words = sax_words_for(ds, 16, 8)
    ranked = sorted(range(100),
                    key=lambda i: (_bitstring_key(words[i], 8), i))
    expect = sorted(ranked[::10][:10])
    assert seasam(ds, 10).tolist() == expect


def test_seasam_stride_property():
    for seed in (36, 37, 38):
        ds = gen_randwalk(107, 32, seed=seed)
        words = sax_words_for(ds, 16, 8)
        order = invsax_order(words, 8).tolist()
        picks = seasam(ds, 10)
        ranks = sorted(order.index(int(i)) for i in picks)
        assert np.all(np.diff(ranks) == 107 // 10)
        assert ranks[0] == 0
        # determinism
        assert np.array_equal(picks, seasam(ds, 10))


def test_seasam_bad_sample_size():
    ds = gen_randwalk(5, 32, seed=39)
    with pytest.raises(BadSampleSize):
        seasam(ds, 0)
    with pytest.raises(BadSampleSize):
        seasam(ds, 6)


def test_uniform_sample_properties():
    ds = gen_randwalk(10_000, 8, seed=40)
    picks = uniform_sample(ds, 1000, seed=7)
    assert picks.size == 1000
    assert np.unique(picks).size == 1000
    assert picks.min() >= 0 and picks.max() < 10_000
    assert np.array_equal(picks, uniform_sample(ds, 1000, seed=7))
    assert not np.array_equal(picks, uniform_sample(ds, 1000, seed=8))


def test_uniform_sample_full():
    ds = gen_randwalk(12, 8, seed=41)
    assert uniform_sample(ds, 12, seed=0).tolist() == list(range(12))


def test_sample_set_validation():
    with pytest.raises(BadSampleSize):
        SampleSet(np.array([3, 3, 5]), "seasam")
    with pytest.raises(BadSampleSize):
        SampleSet(np.array([5, 3]), "seasam")


def test_sample_file_roundtrip(tmp_path):
    sample = SampleSet(np.array([1, 5, 9, 200]), "uniform", seed=3)
    save_sample(sample, tmp_path / "s.idx")
    back = load_sample(tmp_path / "s.idx")
    assert back.indices.tolist() == [1, 5, 9, 200]
    assert back.strategy == "uniform"
    assert back.seed == 3
    raw = np.fromfile(tmp_path / "s.idx", dtype="<u8")
    assert raw.tolist() == [1, 5, 9, 200]
