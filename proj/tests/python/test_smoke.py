import math

import numpy as np
import pytest

import convtact


def test_conv_hand_examples():
    out, backend = convtact.conv([1.0, 2.0, 3.0], [1.0, 1.0])
    assert backend == "direct"
    assert out.tolist() == [1.0, 3.0, 5.0, 3.0]

    out, _ = convtact.conv([[1.0, 2.0], [3.0, 4.0]], [[1.0, 0.0], [0.0, 1.0]])
    assert out.tolist() == [[1, 2, 0], [3, 5, 2], [0, 3, 4]]

    out, _ = convtact.xcorr([1.0, 2.0, 3.0], [-1.0, 1.0], shape="valid")
    assert out.tolist() == [1.0, 1.0]


def test_backends_agree_and_dispatch():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, (40, 30))
    k = rng.uniform(-1, 1, (5, 4))
    direct, b1 = convtact.conv(x, k, method="direct")
    fft, b2 = convtact.conv(x, k, method="fft")
    assert (b1, b2) == ("direct", "fft")
    assert np.max(np.abs(direct - fft)) / np.max(np.abs(direct)) < 1e-10
    _, chosen = convtact.conv(x, k, threshold=20)
    assert chosen == "fft"
    _, chosen = convtact.conv(x, k, threshold=21)
    assert chosen == "direct"


def test_errors_map_to_python():
    with pytest.raises(convtact.RankError):
        convtact.conv(np.zeros((3, 3)), np.zeros(3))
    with pytest.raises(convtact.ShapeError):
        convtact.conv(np.zeros(2), np.zeros(3), shape="valid")
    with pytest.raises(convtact.LookupError):
        convtact.kernel("canny")
    with pytest.raises(ValueError):
        convtact.conv(np.zeros(3), np.zeros(1), shape="circular")


def test_gradient():
    step = np.zeros((5, 4))
    step[:, 2:] = 1.0
    g = convtact.gradient(step, "sobel")
    assert np.all(g["ex"][1:4, 1:3] == 4.0)
    assert np.all(g["ey"] == 0.0)
    assert set(g) == {"ex", "ey", "mag", "dir"}
    kx, ky = convtact.kernel("prewitt3")
    assert np.array_equal(ky, kx.T)


def test_synth_and_ttc():
    frames, truth = convtact.synth(width=96, height=80, frames=4, seed=3)
    assert frames.shape == (4, 80, 96)
    assert [r["ttc"] for r in truth] == [100.0, 99.0, 98.0, 97.0]
    again, _ = convtact.synth(width=96, height=80, frames=4, seed=3)
    assert np.array_equal(frames, again)

    est = convtact.estimate_ttc(frames[0], frames[1])
    assert not est["degenerate"]
    assert abs(est["ttc"] - 100.0) / 100.0 < 0.1

    rows = convtact.ttc_sequence(frames, level=3, multiscale=True)
    assert [r["frame"] for r in rows] == [0, 1, 2]
    assert all(math.isfinite(r["foe_x"]) for r in rows)


def test_file_round_trip(tmp_path):
    a = np.arange(6.0).reshape(1, 2, 3)
    convtact.write_ndt(str(tmp_path / "a.ndt"), a)
    assert np.array_equal(convtact.read_ndt(str(tmp_path / "a.ndt")), a)
    img = np.array([[0.0, 1.0], [0.5, 0.25]])
    convtact.write_pgm(str(tmp_path / "a.pgm"), img, maxval=65535)
    assert np.max(np.abs(convtact.read_pgm(str(tmp_path / "a.pgm")) - img)) < 1e-5
    with pytest.raises(convtact.FormatError):
        (tmp_path / "bad.ndt").write_bytes(b"XXXXjunk")
        convtact.read_ndt(str(tmp_path / "bad.ndt"))


def test_bench_records():
    recs = convtact.bench_sweep(32, [2, 3], ndim=1)
    assert [(r["method"], r["kernel_extent"]) for r in recs] == [
        ("direct", 2), ("fft", 2), ("direct", 3), ("fft", 3)]
    assert all(r["median_ns"] > 0 for r in recs)
