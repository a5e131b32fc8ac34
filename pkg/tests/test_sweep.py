import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from continuum_otto import cycle
from continuum_otto.model import SpecError
from continuum_otto.sweep import (
    FIG3_DEFAULTS,
    STATUS_INVALID,
    STATUS_NO_EFFICIENCY,
    STATUS_OK,
    Axis,
    GridConfig,
    NoFeasibleCellError,
    best_point,
    build_point,
    evaluate_cell,
    evaluate_grid,
    fig3_surface,
    frozen_population_sign_table,
    positive_work_region,
)

SMALL_H = Axis("delta_h", 0.05, 5.0, 21)
SMALL_L = Axis("delta_l", 0.05, 5.0, 21)


@pytest.fixture(scope="module")
def small_fig3():
    return fig3_surface(axis_h=SMALL_H, axis_l=SMALL_L)


class TestAxis:
    def test_values(self):
        assert list(Axis("t_hot", 1.0, 3.0, 3).values()) == [1.0, 2.0, 3.0]
        assert list(Axis("t_hot", 2.0, 2.0, 1).values()) == [2.0]

    @pytest.mark.parametrize("args", [("nope", 0, 1, 2), ("t_hot", 1, 0, 2), ("t_hot", 0, 1, 0)])
    def test_rejects(self, args):
        with pytest.raises(SpecError):
            Axis(*args)

    def test_duplicate_axes(self):
        with pytest.raises(SpecError):
            GridConfig((SMALL_H, SMALL_H))


class TestCells:
    def test_default_cell(self):
        r = evaluate_cell({})
        assert r.status == STATUS_OK
        assert r.net_work == pytest.approx(0.11771700623084776, rel=1e-13)
        assert r.work_diff == pytest.approx(0.11771700623084776, rel=1e-13)

    def test_invalid_cell(self):
        assert evaluate_cell({"t_hot": -1.0}).status == STATUS_INVALID
        assert evaluate_cell({"p0_hot": 1.5}).status == STATUS_INVALID

    def test_undefined_efficiency(self):
        r = evaluate_cell({"gap_l": 2.0, "delta_h": 1.0, "p0_hot": 0.5, "p0_cold": 0.3})
        assert r.status == STATUS_NO_EFFICIENCY
        assert np.isnan(r.efficiency)
        assert np.isfinite(r.net_work)

    def test_cold_density_follows_constraint(self):
        spec, _ = build_point({"delta_h": 3.0, "delta_l": 0.5, "rho_h": 2.0})
        assert spec.cold.rho == pytest.approx(12.0)


class TestFig3:
    def test_shape_and_diagonal(self, small_fig3):
        wd = small_fig3.values["work_diff"]
        assert wd.shape == (21, 21)
        assert set(small_fig3.values) == {"work_diff"}
        assert np.all(np.diag(wd) == 0.0)
        assert np.all(small_fig3.status == STATUS_OK)

    def test_matches_full_net_work(self, small_fig3):
        for coords, values, _ in small_fig3.rows():
            spec, ends = build_point(coords)
            full = cycle.net_work(spec, ends) - cycle.limit_two_level_work(spec, ends)
            assert values["work_diff"] == pytest.approx(full, abs=1e-12)

    def test_default_point_cell(self):
        grid = fig3_surface(axis_h=Axis("delta_h", 2.0, 3.0, 2), axis_l=Axis("delta_l", 1.0, 2.0, 2))
        assert grid.values["work_diff"][0, 0] == pytest.approx(0.11771700623084776, rel=1e-13)

    def test_annotations(self, small_fig3):
        text = "\n".join(small_fig3.annotations)
        assert "diagonal cells: 21, exactly zero: 21" in text
        assert "at delta_h=0.1:" in text and "at delta_h=4.5:" in text
        assert "(decreasing)" in small_fig3.annotations[1]

    def test_needs_two_points(self):
        with pytest.raises(SpecError):
            fig3_surface(axis_h=Axis("delta_h", 1.0, 1.0, 1), axis_l=SMALL_L)

    @settings(max_examples=100)
    @given(
        st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(0.1, 20.0), st.floats(0.1, 20.0),
        st.floats(0.05, 0.95), st.floats(0.05, 0.95),
    )
    def test_swap_symmetry(self, d_h, d_l, t_h, t_l, p_h, p_l):
        # exchanging the (delta, T, p0) triples of the two sides leaves the
        # factorized work difference unchanged
        def wd(dh, dl, th, tl, ph, pl):
            spec, ends = build_point(
                {"delta_h": dh, "delta_l": dl, "t_hot": th, "t_cold": tl, "p0_hot": ph, "p0_cold": pl}
            )
            return cycle.work_difference(spec, ends)

        a = wd(d_h, d_l, t_h, t_l, p_h, p_l)
        b = wd(d_l, d_h, t_l, t_h, p_l, p_h)
        assert b == pytest.approx(a, abs=1e-13)


class TestGrid:
    def test_order_and_workers_do_not_change_bytes(self):
        cfg = GridConfig((Axis("delta_h", 0.5, 3.0, 5), Axis("t_hot", 1.0, 8.0, 4)))
        base = evaluate_grid(cfg)
        order = list(np.ndindex(*cfg.shape))[::-1]
        shuffled = evaluate_grid(cfg, order=order)
        pooled = evaluate_grid(GridConfig(cfg.axes, cfg.fixed, workers=2))
        for g in (shuffled, pooled):
            for q in base.values:
                assert base.values[q].tobytes() == g.values[q].tobytes()
            assert (base.status == g.status).all()

    def test_cell_count(self):
        cfg = GridConfig((Axis("delta_h", 0.5, 3.0, 3), Axis("t_hot", 1.0, 8.0, 4), Axis("p0_hot", 0.1, 0.9, 2)))
        grid = evaluate_grid(cfg)
        assert grid.status.size == 24
        ok = grid.status == STATUS_OK
        assert np.isfinite(grid.values["net_work"][ok]).all()

    def test_equilibrium_mode(self):
        cfg = GridConfig((Axis("t_hot", 2.0, 10.0, 3),), mode="equilibrium")
        grid = evaluate_grid(cfg)
        assert (grid.status != STATUS_INVALID).all()
        with pytest.raises(SpecError):
            GridConfig((Axis("p0_hot", 0.1, 0.5, 2),), mode="equilibrium")


class TestRegions:
    def test_frozen_population_sufficient_condition(self):
        fixed = {**FIG3_DEFAULTS, "p0_hot": 0.4, "p0_cold": 0.4, "delta_h": 2.0, "delta_l": 1.0}
        cfg = GridConfig((Axis("t_hot", 2.5, 10.0, 4),), fixed)
        grid = positive_work_region(cfg)
        assert grid.values["positive"].all()

    def test_reversed_conditions_also_positive(self):
        # delta_h < delta_l and x_h > x_l
        fixed = {**FIG3_DEFAULTS, "p0_hot": 0.4, "p0_cold": 0.4, "delta_h": 1.0, "delta_l": 2.0, "t_hot": 1.2}
        grid = positive_work_region(GridConfig((Axis("t_cold", 3.0, 6.0, 3),), fixed))
        assert grid.values["positive"].all()

    def test_identical_endpoints_no_positive_cells(self):
        fixed = {**FIG3_DEFAULTS, "delta_h": 1.0, "delta_l": 1.0, "gap_h": 1.0, "gap_l": 1.0}
        grid = positive_work_region(GridConfig((Axis("p0_hot", 0.1, 0.9, 5),), fixed))
        assert not grid.values["positive"].any()
        assert grid.values["boundary"].all()

    def test_sign_table(self):
        d = np.linspace(0.05, 5.0, 6)
        actual, predicted = frozen_population_sign_table(d, d, [0.5, 2.0, 7.0])
        assert ((actual > 0) == (predicted > 0)).all()


class TestBestPoint:
    def test_single_cell(self):
        cfg = GridConfig((Axis("delta_h", 2.0, 2.0, 1),))
        index, coords, value = best_point(cfg)
        assert index == (0,)
        assert coords == {"delta_h": 2.0}
        assert value == pytest.approx(0.11771700623084776, rel=1e-13)

    def test_monotone_corner(self):
        # net work grows with the hot broadening at this point
        cfg = GridConfig((Axis("delta_h", 1.0, 4.0, 7),))
        grid = evaluate_grid(cfg)
        assert np.all(np.diff(grid.values["net_work"]) > 0)
        assert best_point(cfg)[0] == (6,)

    def test_ties_go_to_lowest_index(self):
        fixed = {**FIG3_DEFAULTS, "delta_l": 2.0}
        cfg = GridConfig((Axis("delta_h", 2.0, 2.0, 1), Axis("e0_h", 0.0, 0.0, 3)), fixed)
        grid = evaluate_grid(cfg)
        assert best_point(grid, "net_work")[0] == (0, 0)

    def test_all_invalid(self):
        cfg = GridConfig((Axis("t_hot", -3.0, -1.0, 3),))
        with pytest.raises(NoFeasibleCellError, match="no feasible cell"):
            best_point(cfg, "net_work")

    def test_efficiency_skips_undefined(self):
        fixed = {**FIG3_DEFAULTS, "delta_h": 1.0, "gap_l": 2.0}
        cfg = GridConfig((Axis("p0_hot", 0.1, 0.6, 6),), fixed)
        grid = evaluate_grid(cfg)
        assert (grid.status == STATUS_NO_EFFICIENCY).any()
        index, _, value = best_point(grid, "efficiency")
        assert grid.status[index] == STATUS_OK
        assert np.isfinite(value)
