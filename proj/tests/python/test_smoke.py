import math
import os
import pathlib

import pytest

import escalife

DATA_DIR = pathlib.Path(os.environ.get("ESCALIFE_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))


def test_lhi_weights():
    assert escalife.compute_lhi(1, 0, 0, 0, 0) == pytest.approx(0.2)
    assert escalife.compute_lhi(0, 0, 1, 0, 0) == pytest.approx(0.3)
    assert escalife.compute_lhi(0.49, 0.08, 0.19, 0.0, 0.18) == pytest.approx(0.189)


def test_normalize_clamps():
    assert escalife.normalize(33.0, "fault_count") == 1.0
    assert escalife.normalize(100.0, "C") == 1.0
    with pytest.raises(escalife.Error):
        escalife.normalize(1.0, "nope")


def test_rul_formula():
    r = escalife.remaining_useful_life(0.3, 18.0)
    assert r["rul"] == pytest.approx(35.0 - math.log(0.3 / 0.0928) / 0.0665)
    assert r["end_age"] == pytest.approx(18.0 + r["rul"])
    with pytest.raises(ValueError):
        escalife.remaining_useful_life(0.0, 18.0)


def test_fit_recovers_curve():
    ages = [5.0 + i for i in range(10)]
    ys = [0.0928 * math.exp(0.0665 * t) for t in ages]
    a, b = escalife.fit_exponential(ages, ys)
    assert a == pytest.approx(0.0928, rel=1e-9)
    assert b == pytest.approx(0.0665, rel=1e-9)


def test_fft_tone():
    n = 4096
    fs = 25600.0
    k = 100
    x = [math.sin(2 * math.pi * k * i / n) for i in range(n)]
    bin_hz, mags = escalife.fft_magnitude(x, fs)
    assert bin_hz == pytest.approx(fs / n)
    assert max(range(len(mags)), key=mags.__getitem__) == k
    assert mags[k] == pytest.approx(1 / math.sqrt(2))


def test_vibration_helpers():
    mags = [0.0] * 1280
    mags[300] = 1.0
    mags[500] = 0.5
    mags[700] = 0.5
    assert escalife.at_value(mags, 10.0, 2.0, 10.0) == 1.0
    assert escalife.exceedance_area([0.1, 0.2, 0.3]) == pytest.approx(0.2)


def test_cli_exit_codes():
    code, _, err = escalife.cli([])
    assert code == 2
    assert "simulate" in err
    code, out, _ = escalife.cli(["--help"])
    assert code == 0
    assert "report" in out


def test_cli_rul_on_bundled_features(tmp_path):
    store = tmp_path / "store"
    features = DATA_DIR / "reference_fleet_2021Q4.csv"
    # rul needs an existing store; ingesting an empty directory creates one.
    (tmp_path / "raw").mkdir()
    assert escalife.cli(["ingest", "--raw", str(tmp_path / "raw"), "--store", str(store)])[0] == 0
    code, _, err = escalife.cli(
        ["rul", "--store", str(store), "--features", str(features), "--quarter", "2021Q4", "--out", "rul.csv"]
    )
    assert code == 0, err
    rows = (store / "rul.csv").read_text().splitlines()
    assert len(rows) == 25
    assert rows[12].split(",")[5] == "24.3038"
