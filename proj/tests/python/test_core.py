import math

import pytest

kx = pytest.importorskip("kinex")


def test_gl_closure_values():
    m = kx.DepairingModel(kx.DepairingKind.gl_parametric, 0.3, 25.0, 10.0)
    assert kx.lk_ratio(m, 0.0) == 1.0
    assert kx.lk_ratio(m, 1.0) == pytest.approx(1.5, abs=1e-9)
    assert kx.small_signal_coefficient(m) == pytest.approx(4.0 / 27.0, abs=1e-6)
    with pytest.raises(kx.DomainError):
        kx.lk_ratio(m, 1.01)


def test_dynes_zero_energy():
    assert kx.dynes_dos(0.0, 1.5, 0.15) == pytest.approx(0.15 / math.hypot(0.15, 1.5), rel=1e-9)


def test_default_device_resonates_in_band():
    dev = kx.default_device()
    assert dev.depairing_current(4.0) == pytest.approx(25.0, rel=1e-6)
    rec = kx.simulate_s21(dev, kx.BiasPoint(0.0, 4.0, 0.0), kx.linear_grid(4.0, 10.0, 3001))
    fits = kx.fit_all(rec)
    assert len(fits) == 1
    assert 4.0 < fits[0].f0 < 10.0
    assert fits[0].q_total > 0


def test_depairing_fit_round_trip():
    m = kx.DepairingModel(kx.DepairingKind.gl_parametric, 0.3, 25.0, 10.0)
    series = [(i, 7.0 / math.sqrt(kx.lk_ratio(m, i / 25.0))) for i in [0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0, 17.5]]
    fit = kx.fit_depairing(kx.lk_curve_from_f0(series), kx.DepairingKind.gl_parametric)
    assert fit.i_dep == pytest.approx(25.0, rel=1e-3)


def test_counts_and_errors():
    cm = kx.default_count_model()
    assert kx.dcr_rate(cm, 20.0, 2.0) == pytest.approx(1e9)
    curve = kx.dcr_curve(cm, [0.01 * k for k in range(2001)], 4.0)
    assert 6.0 < kx.dcr_onset(curve) < 10.0
    with pytest.raises(kx.KinexError):
        kx.dcr_rate(cm, -1.0, 2.0)


def test_touchstone_and_cli(tmp_path, data_dir, config_dir):
    recs = kx.read_touchstone(str(data_dir / "golden_ma.s2p"))
    assert len(recs) == 2 and recs[1].bias.current == 7.25
    with pytest.raises(kx.ParseError):
        kx.read_touchstone(str(data_dir / "malformed_option.s2p"))
    code, out, _ = kx.run_cli(["selftest"])
    assert code == 0, out
    code, _, err = kx.run_cli(["fit", "--in", str(data_dir / "malformed_option.s2p"), "--out", str(tmp_path)])
    assert code == 2 and "line 3" in err
