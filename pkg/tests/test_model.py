import math

import pytest
from hypothesis import given, strategies as st

from continuum_otto.model import (
    CycleSpec,
    LevelStructure,
    PopulationEndpoints,
    SpecError,
    make_spec_from_broadenings,
    require_valid,
    rescaling_mismatch,
    validate_spec,
)


def _spec(hot_delta, hot_rho, cold_delta, cold_rho, t_hot=5.0, t_cold=1.0):
    hot = LevelStructure(0.0, 1.0, hot_delta, hot_rho)
    cold = LevelStructure(0.0, 1.0, cold_delta, cold_rho)
    return CycleSpec(hot, cold, t_hot, t_cold)


class TestLevelStructure:
    def test_derived_energies(self):
        s = LevelStructure(0.5, 1.0, 2.0, 3.0)
        assert s.e_min == 1.5
        assert s.e_max == 3.5
        assert s.band_states == 6.0

    @pytest.mark.parametrize(
        "args",
        [
            (0.0, 1.0, 0.0, 1.0),
            (0.0, 1.0, -1.0, 1.0),
            (0.0, 1.0, 1.0, 0.0),
            (0.0, -0.1, 1.0, 1.0),
            (math.nan, 1.0, 1.0, 1.0),
            (0.0, math.inf, 1.0, 1.0),
        ],
    )
    def test_rejects_bad_structure(self, args):
        with pytest.raises(SpecError):
            LevelStructure(*args)

    def test_zero_gap_allowed(self):
        assert LevelStructure(0.0, 0.0, 1.0, 1.0).e_min == 0.0


class TestValidateSpec:
    def test_equal_products_valid(self):
        report = validate_spec(_spec(2.0, 1.0, 1.0, 2.0))
        assert report.ok
        assert not report.errors

    def test_rescaling_violation(self):
        report = validate_spec(_spec(2.0, 1.0, 1.0, 1.0))
        assert not report.ok
        assert "rescaling constraint" in report.kinds()
        assert "2" in report.errors[0].message and "1" in report.errors[0].message

    def test_degenerate_flagged_but_valid(self):
        s = LevelStructure(0.0, 1.0, 1.5, 0.7)
        report = validate_spec(CycleSpec(s, s, 2.0, 2.0))
        assert report.ok
        assert "degenerate" in report.kinds()
        assert any(w.message.startswith("degenerate: zero-work cycle candidate") for w in report.warnings)

    def test_nonpositive_temperature(self):
        report = validate_spec(_spec(2.0, 1.0, 1.0, 2.0, t_hot=0.0))
        assert "temperature" in report.kinds()
        with pytest.raises(SpecError):
            require_valid(_spec(2.0, 1.0, 1.0, 2.0, t_cold=-1.0))

    def test_reversed_temperatures_warn(self):
        report = validate_spec(_spec(2.0, 1.0, 1.0, 2.0, t_hot=1.0, t_cold=2.0))
        assert report.ok
        assert "temperature order" in report.kinds()

    def test_tolerance_is_relative(self):
        rho = 1.0 / 3.0
        spec = _spec(3.0, rho, 1.0, 1.0)
        assert rescaling_mismatch(spec) < 1e-12
        assert validate_spec(spec).ok
        assert not validate_spec(_spec(3.0, rho * (1 + 1e-9), 1.0, 1.0)).ok


class TestMakeSpec:
    @pytest.mark.parametrize(
        "d_h, d_l, rho_h, rho_l",
        [(2.0, 1.0, 1.0, 2.0), (1.0, 1.0, 3.0, 3.0), (5.0, 2.0, 0.4, 1.0)],
    )
    def test_cold_density(self, d_h, d_l, rho_h, rho_l):
        spec = make_spec_from_broadenings(1.0, d_h, 1.0, d_l, rho_h, 5.0, 1.0)
        assert spec.cold.rho == pytest.approx(rho_l, rel=1e-15)
        assert validate_spec(spec).ok

    @given(
        st.floats(0.05, 5.0),
        st.floats(0.05, 5.0),
        st.floats(0.1, 10.0),
    )
    def test_constraint_always_holds(self, d_h, d_l, rho_h):
        spec = make_spec_from_broadenings(0.5, d_h, 0.2, d_l, rho_h, 3.0, 1.0)
        assert rescaling_mismatch(spec) <= 1e-12

    def test_scaled_spec_keeps_constraint(self):
        spec = make_spec_from_broadenings(1.0, 2.0, 0.5, 1.0, 1.0, 5.0, 1.0).scaled(3.7)
        assert validate_spec(spec).ok
        assert spec.x_hot == pytest.approx(2.0 / 5.0, rel=1e-15)


class TestEndpoints:
    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.2, math.nan])
    def test_rejects_out_of_range(self, p):
        with pytest.raises(SpecError):
            PopulationEndpoints(p, 0.5)

    def test_interior_accepted(self):
        e = PopulationEndpoints(0.3, 0.5)
        assert e.mode == "free"
