import math
import struct

import numpy as np
import pytest

from seaidx import (
    ConstantSeries,
    Dataset,
    LengthMismatch,
    MalformedMeta,
    SizeMismatch,
    euclidean,
    euclidean_to_rows,
    load_dataset,
    save_dataset,
    znormalize,
    znormalize_rows,
)


def test_znormalize_already_normal():
    out = znormalize([1.0, -1.0])
    assert np.allclose(out, [1.0, -1.0], atol=1e-12)


def test_znormalize_constant_series_rejected():
    with pytest.raises(ConstantSeries):
        znormalize([5.0, 5.0, 5.0, 5.0])


def test_znormalize_pinned():
    # mean 1.5, population std sqrt(1.25), computed by hand
    expected = [-1.3416407864998738, -0.4472135954999579,
                0.4472135954999579, 1.3416407864998738]
    assert np.allclose(znormalize([0.0, 1.0, 2.0, 3.0]), expected, atol=1e-12)


def test_znormalize_postconditions_and_idempotence():
    rng = np.random.Generator(np.random.Philox(key=1))
    for _ in range(20):
        x = rng.standard_normal(64) * rng.uniform(0.5, 20) + rng.uniform(-5, 5)
        z = znormalize(x)
        assert abs(z.mean()) <= 1e-6
        assert abs(z.std() - 1) <= 1e-6
        assert np.abs(znormalize(z) - z).max() <= 1e-6


def test_znormalize_rows_matches_per_series():
    rng = np.random.Generator(np.random.Philox(key=2))
    data = rng.standard_normal((10, 32)) * 3 + 1
    rows = znormalize_rows(data)
    for i in range(10):
        assert np.allclose(rows[i], znormalize(data[i]), atol=1e-12)


def test_euclidean_identity_and_offset():
    x = np.arange(5, dtype=float)
    assert euclidean(x, x) == 0.0
    assert math.isclose(euclidean([0, 0, 0], [1, 1, 1]), math.sqrt(3), rel_tol=1e-15)


def test_euclidean_pinned_scalar_oracle():
    rng = np.random.Generator(np.random.Philox(key=20240601))
    a = rng.standard_normal(16)
    b = rng.standard_normal(16)
    assert math.isclose(euclidean(a, b), 5.267762844790779, rel_tol=1e-12)


def test_euclidean_length_mismatch():
    with pytest.raises(LengthMismatch):
        euclidean([1, 2], [1, 2, 3])


def test_euclidean_triangle_inequality():
    rng = np.random.Generator(np.random.Philox(key=3))
    for _ in range(200):
        a, b, c = rng.standard_normal((3, 24))
        ab, bc, ac = euclidean(a, b), euclidean(b, c), euclidean(a, c)
        assert ac <= ab + bc + 1e-9 * max(ac, 1.0)


def test_euclidean_to_rows_matches_scalar():
    rng = np.random.Generator(np.random.Philox(key=4))
    data = rng.standard_normal((30, 16)).astype(np.float32)
    q = rng.standard_normal(16)
    dists = euclidean_to_rows(data, q)
    for i in range(30):
        assert math.isclose(dists[i], euclidean(data[i], q), rel_tol=1e-12)


def test_dataset_roundtrip_bit_exact(tmp_path):
    rng = np.random.Generator(np.random.Philox(key=5))
    ds = Dataset(rng.standard_normal((3, 4)), znormalized=False, seed=42)
    path = tmp_path / "tiny.bin"
    save_dataset(ds, path)
    back = load_dataset(path)
    assert back.data.tobytes() == ds.data.tobytes()
    assert (back.n, back.m, back.znormalized, back.seed) == (3, 4, False, 42)


def test_dataset_truncated_payload(tmp_path):
    rng = np.random.Generator(np.random.Philox(key=6))
    ds = Dataset(rng.standard_normal((3, 4)))
    path = tmp_path / "trunc.bin"
    save_dataset(ds, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-4])
    with pytest.raises(SizeMismatch):
        load_dataset(path)


def test_dataset_malformed_meta(tmp_path):
    path = tmp_path / "bad.bin"
    np.zeros((2, 2), dtype="<f4").tofile(path)
    (tmp_path / "bad.meta").write_text("n=2\nznormalized=0\n")  # missing m
    with pytest.raises(MalformedMeta):
        load_dataset(path)
    (tmp_path / "bad.meta").write_text("n=two\nm=2\nznormalized=0\n")
    with pytest.raises(MalformedMeta):
        load_dataset(path)


def test_load_file_written_independently(tmp_path):
    # hand-rolled writer: struct-packed little-endian floats + text sidecar
    values = [[0.5, -1.25, 3.0], [7.5, 0.125, -2.0]]
    payload = b"".join(struct.pack("<f", v) for row in values for v in row)
    (tmp_path / "ext.bin").write_bytes(payload)
    (tmp_path / "ext.meta").write_text("n=2\nm=3\nznormalized=0\n")
    ds = load_dataset(tmp_path / "ext.bin")
    assert np.array_equal(ds.data, np.asarray(values, dtype=np.float32))


def test_dataset_is_readonly():
    ds = Dataset(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        ds.data[0, 0] = 1.0
