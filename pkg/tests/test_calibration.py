import pytest

from hetalu.models.adder import ClockConfig
from hetalu.services.adder_service import cycles_per_chunk
from hetalu.services.calibration_service import (
    PUBLISHED_AGGREGATE, PUBLISHED_ANCHORS, CalibrationError, EnergyAnchor, FitModel, anchor_error,
    fit_calibration, load_anchors, load_calibration, render_calibration, resolve_calibration,
)
from tests.conftest import FIXTURES, REPO_ROOT


def test_default_fit_shape(calibration):
    """Test the built-in table: linear latency, proportional area, 1% static."""
    assert calibration.widths == (4, 8, 16, 32, 64)
    clock = ClockConfig(calibration.frequency_ghz)
    assert [cycles_per_chunk(a, clock) for a in calibration.adders] == [1, 1, 2, 3, 6]
    for adder in calibration.adders:
        assert adder.latency_ns == pytest.approx(0.09 * adder.width_bits)
        assert adder.area_units == adder.width_bits
        assert adder.static_power_mw == pytest.approx(0.01 * adder.dynamic_power_mw)

    powers = [a.dynamic_power_mw for a in calibration.adders]
    assert powers == sorted(powers)
    assert calibration.adder(32).dynamic_power_mw == pytest.approx(0.218 / 2.88, rel=1e-3)


def test_default_fit_anchor_errors(calibration):
    """Test each published anchor is reproduced within tolerance."""
    for anchor in PUBLISHED_ANCHORS:
        assert abs(anchor_error(calibration, anchor)) <= 0.15


def test_default_fit_aggregate_ratio(calibration, evaluated):
    """Test the homogeneous 32-bit core spends a quarter of the 64-bit core's energy."""
    ratio = evaluated("homog:32").total_energy_pj / evaluated("homog:64").total_energy_pj
    assert ratio == pytest.approx(PUBLISHED_AGGREGATE.energy_ratio, rel=1e-9)


def test_fit_rejects_unreachable_anchor():
    """Test that a fit which cannot meet its anchors fails loudly."""
    anchors = PUBLISHED_ANCHORS + (EnergyAnchor("outlier", 8, 8, 0.5),)
    with pytest.raises(CalibrationError, match="misses"):
        fit_calibration(anchors, FitModel(anchor_tolerance=0.05))


def test_fit_rejects_bad_anchors():
    """Test anchor validation."""
    with pytest.raises(CalibrationError, match="At least one"):
        fit_calibration(())
    with pytest.raises(CalibrationError, match="uncalibrated width"):
        fit_calibration((EnergyAnchor("odd", 12, 12, 0.1),))
    with pytest.raises(CalibrationError, match="must be positive"):
        fit_calibration((EnergyAnchor("zero", 8, 8, 0.0),))


def test_render_and_load_round_trip(calibration, tmp_path):
    """Test that a rendered table loads back unchanged."""
    path = tmp_path / "cal.ini"
    path.write_text(render_calibration(calibration), encoding="utf-8")
    assert load_calibration(path) == calibration


def test_load_calibration_rejects_unknown_key():
    """Test unknown keys are an error, not silently ignored."""
    with pytest.raises(CalibrationError, match="leakage_mw"):
        load_calibration(FIXTURES / "bad_key_calibration.ini")


def test_load_calibration_errors(tmp_path):
    """Test malformed calibration files."""
    unknown_section = tmp_path / "section.ini"
    unknown_section.write_text("[turbo]\nboost = 1\n", encoding="utf-8")
    with pytest.raises(CalibrationError, match="Unknown section"):
        load_calibration(unknown_section)

    missing = tmp_path / "missing.ini"
    missing.write_text("[adder.8]\nwidth = 8\nlatency_ns = 0.72\n", encoding="utf-8")
    with pytest.raises(CalibrationError, match="Missing key"):
        load_calibration(missing)

    mislabeled = tmp_path / "mislabeled.ini"
    mislabeled.write_text(
        "[adder.8]\nwidth = 16\nlatency_ns = 1.44\ndynamic_power_mw = 0.03\nstatic_power_mw = 0.0003\n",
        encoding="utf-8",
    )
    with pytest.raises(CalibrationError, match="declares width 16"):
        load_calibration(mislabeled)

    not_a_number = tmp_path / "nan.ini"
    not_a_number.write_text(
        "[adder.8]\nwidth = 8\nlatency_ns = fast\ndynamic_power_mw = 0.03\nstatic_power_mw = 0.0003\n",
        encoding="utf-8",
    )
    with pytest.raises(CalibrationError, match="not a valid float"):
        load_calibration(not_a_number)

    with pytest.raises(CalibrationError, match="Cannot read"):
        load_calibration(tmp_path / "absent.ini")


def test_shipped_anchor_file_reproduces_default_fit(calibration):
    """Test calibration/anchors.ini fits the same table as the built-in anchors."""
    anchors, model, aggregate = load_anchors(REPO_ROOT / "calibration" / "anchors.ini")
    assert [a.name for a in anchors] == [a.name for a in PUBLISHED_ANCHORS]
    assert aggregate == PUBLISHED_AGGREGATE
    table = fit_calibration(anchors, model, aggregate)
    for fitted, default in zip(table.adders, calibration.adders):
        assert fitted.width_bits == default.width_bits
        assert fitted.dynamic_power_mw == pytest.approx(default.dynamic_power_mw, rel=1e-9)


def test_resolve_calibration_from_environment(calibration, tmp_path, monkeypatch):
    """Test $HETALU_CALIBRATION overrides the built-in fit."""
    slow = calibration.scaled(3.0)
    path = tmp_path / "slow.ini"
    path.write_text(render_calibration(slow), encoding="utf-8")

    assert resolve_calibration() == calibration
    monkeypatch.setenv("HETALU_CALIBRATION", str(path))
    assert resolve_calibration() == slow

    # Explicit path wins over the environment
    fast = calibration.scaled(0.5)
    explicit = tmp_path / "fast.ini"
    explicit.write_text(render_calibration(fast), encoding="utf-8")
    assert resolve_calibration(str(explicit)) == fast


def test_load_calibration_rejects_invalid_values(calibration, tmp_path):
    """Test out-of-range numbers in a calibration file are calibration errors."""
    text = render_calibration(calibration)
    for old, new in (("frequency_ghz = 1.0", "frequency_ghz = 0"),
                     ("frequency_ghz = 1.0", "frequency_ghz = nan"),
                     ("unit_area = 1.0", "unit_area = -1.0")):
        path = tmp_path / "invalid.ini"
        path.write_text(text.replace(old, new), encoding="utf-8")
        with pytest.raises(CalibrationError, match="Invalid calibration"):
            load_calibration(path)


def test_fit_rejects_invalid_model(tmp_path):
    """Test bad [model] values in an anchors file fail as calibration errors."""
    shipped = (REPO_ROOT / "calibration" / "anchors.ini").read_text(encoding="utf-8")
    cases = (
        ("latency_ns_per_bit = 0.09", "latency_ns_per_bit = -0.09", "latency_ns_per_bit"),
        ("frequency_ghz = 1.0", "frequency_ghz = 0", "frequency_ghz"),
        ("widths = 4, 8, 16, 32, 64", "widths = 4, 8, 12, 32, 64", "widths"),
        ("static_fraction = 0.01", "static_fraction = -0.5", "static_fraction"),
    )
    for old, new, key in cases:
        path = tmp_path / "anchors.ini"
        path.write_text(shipped.replace(old, new), encoding="utf-8")
        anchors, model, aggregate = load_anchors(path)
        with pytest.raises(CalibrationError, match=key):
            fit_calibration(anchors, model, aggregate)

    with pytest.raises(CalibrationError, match="Cannot fit"):
        fit_calibration((EnergyAnchor("wide", 8, 128, 0.1),))
