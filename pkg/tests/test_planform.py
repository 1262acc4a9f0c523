import json
import math

import numpy as np
import pytest

from milliswim.errors import DomainError, InvalidPlanformError
from milliswim.planform import (
    NEW_DESIGN_RDF_HEAD,
    NEW_DESIGN_RDF_TAIL,
    OLD_DESIGN_RDF_HEAD,
    OLD_DESIGN_RDF_TAIL,
    Planform,
    chord_at,
    rdf_report,
    rdf_report_from_constants,
    resistive_drag_factor,
)

# Frozen from the midpoint-rule oracle (1e6 uniform slices) for
# h(x) = 8*(1-(x/12)^2) over [0, 12]; analytic value is 8*(12^4/4 - 12^6/(6*144)).
PARABOLA_RDF = 13824.0


def midpoint_rdf(chord, a, b, n):
    x = a + (np.arange(n) + 0.5) * (b - a) / n
    return float(np.sum(chord(x) * np.abs(x) ** 3) * (b - a) / n)


class TestChordAt:
    def test_rectangle_center(self):
        p = Planform.rectangle(10.0, 5.0, 5.0)
        assert chord_at(p, 0.0) == 10.0

    def test_rectangle_edge(self):
        p = Planform.rectangle(10.0, 5.0, 5.0)
        assert chord_at(p, 5.0) == 10.0

    def test_parabola_root(self):
        p = Planform.parabola(8.0, 12.0)
        assert chord_at(p, 12.0) == 0.0

    def test_out_of_domain(self):
        p = Planform.rectangle(10.0, 5.0, 5.0)
        with pytest.raises(DomainError):
            chord_at(p, 5.1)
        with pytest.raises(DomainError):
            chord_at(p, -5.1)


class TestResistiveDragFactor:
    def test_symmetric_rectangle(self):
        p = Planform.rectangle(10.0, 5.0, 5.0)
        assert resistive_drag_factor(p) == pytest.approx(3125.0, rel=1e-10)

    def test_one_sided_rectangle(self):
        p = Planform.rectangle(10.0, 0.0, 10.0)
        assert resistive_drag_factor(p) == pytest.approx(25000.0, rel=1e-10)

    def test_parabolic_tail_against_oracle(self):
        p = Planform.parabola(8.0, 12.0)
        assert resistive_drag_factor(p) == pytest.approx(PARABOLA_RDF, rel=1e-6)
        oracle = midpoint_rdf(lambda x: 8.0 * (1 - (x / 12.0) ** 2), 0.0, 12.0, 100_000)
        assert resistive_drag_factor(p) == pytest.approx(oracle, rel=1e-6)

    def test_rectangle_exactness_randomized(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            h, l1, l2 = rng.uniform(0.5, 20.0, size=3)
            p = Planform.rectangle(h, l1, l2)
            exact = h * (l1**4 + l2**4) / 4.0
            assert resistive_drag_factor(p) == pytest.approx(exact, rel=1e-10)

    def test_pointwise_chord_monotonicity(self):
        small = Planform.parabola(8.0, 12.0)
        big = Planform(lambda x: 8.0 * (1 - (x / 12.0) ** 2) + 1.0, 0.0, 12.0)
        assert resistive_drag_factor(big) > resistive_drag_factor(small)

    @pytest.mark.parametrize("s", [0.5, 2.0])
    def test_length_scaling_power_five(self, s):
        base = Planform.parabola(8.0, 12.0, l1=3.0)
        scaled = Planform(
            lambda x: s * max(0.0, 8.0 * (1 - (x / s / 12.0) ** 2)),
            3.0 * s,
            12.0 * s,
        )
        assert resistive_drag_factor(scaled) == pytest.approx(
            s**5 * resistive_drag_factor(base), rel=1e-8
        )

    def test_invalid_span(self):
        with pytest.raises(InvalidPlanformError):
            Planform.rectangle(10.0, 0.0, 0.0)
        with pytest.raises(InvalidPlanformError):
            Planform.rectangle(10.0, -1.0, 5.0)


class TestRdfReport:
    def test_new_design_constants(self):
        r = rdf_report_from_constants(NEW_DESIGN_RDF_HEAD, NEW_DESIGN_RDF_TAIL)
        assert r.ratio_head_over_tail == pytest.approx(10.65, abs=0.01)
        assert r.implied_speed_ratio == r.i_head / r.i_tail

    def test_old_design_constants(self):
        r = rdf_report_from_constants(OLD_DESIGN_RDF_HEAD, OLD_DESIGN_RDF_TAIL)
        assert r.ratio_head_over_tail == pytest.approx(0.858, abs=0.001)
        assert r.ratio_head_over_tail < 1.0  # tail out-drags the head

    def test_identical_planforms(self):
        p = Planform.rectangle(10.0, 5.0, 5.0, "head")
        r = rdf_report(p, p)
        assert r.ratio_head_over_tail == pytest.approx(1.0, rel=1e-12)
        assert r.implied_speed_ratio == pytest.approx(1.0, rel=1e-12)

    def test_ratio_swap_inversion(self):
        a = Planform.rectangle(10.0, 5.0, 5.0)
        b = Planform.parabola(8.0, 12.0)
        assert rdf_report(a, b).ratio_head_over_tail == pytest.approx(
            1.0 / rdf_report(b, a).ratio_head_over_tail, rel=1e-9
        )

    def test_zero_rdf_rejected(self):
        zero = Planform(lambda x: 0.0, 0.0, 10.0)
        good = Planform.rectangle(10.0, 5.0, 5.0)
        with pytest.raises(InvalidPlanformError):
            rdf_report(zero, good)
        with pytest.raises(InvalidPlanformError):
            rdf_report_from_constants(0.0, 1.0)


class TestConfigLoading:
    def test_rectangle_roundtrip(self, tmp_path):
        cfg = tmp_path / "head.json"
        cfg.write_text(json.dumps(
            {"kind": "rectangle", "height_mm": 10.0, "l1_mm": 5.0, "l2_mm": 5.0,
             "label": "head"}
        ))
        p = Planform.from_file(cfg)
        assert p.label == "head"
        assert resistive_drag_factor(p) == pytest.approx(3125.0, rel=1e-10)

    def test_parabola(self, tmp_path):
        cfg = tmp_path / "tail.json"
        cfg.write_text(json.dumps({"kind": "parabola", "height_mm": 8.0, "root_mm": 12.0}))
        assert resistive_drag_factor(Planform.from_file(cfg)) == pytest.approx(
            PARABOLA_RDF, rel=1e-6
        )

    def test_tabulated_linear_interpolation(self, tmp_path):
        # triangular chord: h(0) = 6, h(10) = 0
        cfg = tmp_path / "tab.json"
        cfg.write_text(json.dumps(
            {"kind": "tabulated", "points": [[0.0, 6.0], [10.0, 0.0]],
             "l1_mm": 0.0, "l2_mm": 10.0}
        ))
        p = Planform.from_file(cfg)
        assert chord_at(p, 5.0) == pytest.approx(3.0)
        # analytic: int (6 - 0.6 x) x^3 = 6*10^4/4 - 0.6*10^5/5 = 3000
        assert resistive_drag_factor(p) == pytest.approx(3000.0, rel=1e-5)

    def test_unknown_kind(self):
        with pytest.raises(InvalidPlanformError):
            Planform.from_config({"kind": "ellipse"})
