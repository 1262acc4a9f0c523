import json
import math

import numpy as np
import pytest

from milliswim.control import ReferencePath
from milliswim.errors import DomainError
from milliswim.metrics import (
    SwimmerSpec,
    cost_of_transport,
    format_table,
    metrics_summary,
    reynolds,
    strouhal,
    swim_number,
    trajectory_stats,
)

SPEC = SwimmerSpec()
DEG = math.pi / 180.0


class TestCostOfTransport:
    def test_reference_point(self):
        # 72 mW at 13.6 mm/s: reported dimensionless cost 9304 within 5%
        cot = cost_of_transport(72e-3, SPEC, 13.6e-3)
        assert cot == pytest.approx(9304.0, rel=0.05)

    def test_slow_point(self):
        cot = cost_of_transport(64.8e-3, SPEC, 5.7e-3)
        assert cot == pytest.approx(20127.0, rel=0.05)

    def test_speed_inverse(self):
        assert cost_of_transport(72e-3, SPEC, 2 * 13.6e-3) == pytest.approx(
            0.5 * cost_of_transport(72e-3, SPEC, 13.6e-3)
        )

    def test_nonpositive_speed(self):
        with pytest.raises(DomainError):
            cost_of_transport(72e-3, SPEC, 0.0)


class TestStrouhal:
    def test_reference_point(self):
        assert strouhal(2.0, 6.34e-3, 13.6e-3) == pytest.approx(0.93, abs=0.01)

    def test_slow_point(self):
        assert strouhal(0.5, 6.5e-3, 5.7e-3) == pytest.approx(0.57, rel=0.02)

    def test_zero_excursion(self):
        assert strouhal(2.0, 0.0, 0.01) == 0.0

    def test_nonpositive_speed(self):
        with pytest.raises(DomainError):
            strouhal(2.0, 6.34e-3, -1.0)


class TestReynolds:
    def test_reference_point(self):
        assert reynolds(13.6e-3, 36e-3) == pytest.approx(489.6)

    def test_zero_speed(self):
        assert reynolds(0.0, 36e-3) == 0.0

    def test_length_linearity(self):
        assert reynolds(0.01, 0.072) == pytest.approx(2 * reynolds(0.01, 0.036))

    def test_bad_nu(self):
        with pytest.raises(DomainError):
            reynolds(0.01, 0.036, nu=0.0)


class TestSwimNumber:
    def test_reference_point(self):
        assert swim_number(2.0, 6.34e-3, 36e-3) == pytest.approx(2868.0, rel=0.01)

    def test_zero_excursion(self):
        assert swim_number(2.0, 0.0, 36e-3) == 0.0

    def test_identity_randomized(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            f, app, v, length = rng.uniform(0.1, 10.0, size=4)
            sw = swim_number(f, app, length)
            ident = 2 * math.pi * reynolds(v, length) * strouhal(f, app, v)
            assert sw == pytest.approx(ident, rel=1e-12)

    def test_homogeneity(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            f, app, v, length, s = rng.uniform(0.2, 5.0, size=5)
            # St is invariant when f*app and v scale together; Sw scales as s^2
            assert strouhal(s * f, app, s * v) == pytest.approx(
                strouhal(f, app, v) * 1.0, rel=1e-12
            )
            assert swim_number(f, s * app, s * length) == pytest.approx(
                s**2 * swim_number(f, app, length), rel=1e-12
            )


class TestSummaryFormatting:
    def test_fields(self):
        s = metrics_summary(cot=1.0, st=2.0, re=3.0, sw=4.0)
        assert list(s) == ["cot", "st", "re", "sw"]

    def test_table_contains_values(self):
        txt = format_table(metrics_summary(cot=9304.0, st=0.93, re=489.6, sw=2868.0))
        assert "9304" in txt and "0.93" in txt

    def test_stats_json_roundtrip(self):
        from milliswim.metrics import TrajectoryStats

        ts = TrajectoryStats(2.6e-3, 9.1e-3, 0.0, math.nan)
        d = json.loads(ts.to_json())
        assert d["rms_error_m"] == 2.6e-3
        assert d["turn_radius_m"] is None


def straight_log(n=2001, dt=0.01, v=10e-3, offset=0.0):
    t = np.arange(n) * dt
    return t, t * v, np.full(n, offset), np.full(n, v), np.zeros(n)


class TestTrajectoryStats:
    def test_on_path_zero_rms(self):
        t, r1, r2, v, w = straight_log()
        st = trajectory_stats(t, r1, r2, v, w, ReferencePath.rectilinear(), 10.0)
        assert st.rms_error_m == 0.0
        assert st.mean_speed_mps == pytest.approx(10e-3)
        assert math.isnan(st.turn_radius_m)

    def test_constant_offset(self):
        t, r1, r2, v, w = straight_log(offset=2.6e-3)
        st = trajectory_stats(t, r1, r2, v, w, ReferencePath.rectilinear(), 10.0)
        assert st.rms_error_m == pytest.approx(2.6e-3)

    def test_synthetic_circle_radius(self):
        # quarter-circle turn appended to a straight approach
        w_turn = 13.1 * DEG
        v = 2.29e-3
        dt = 1e-3
        n_straight = 2000
        n_turn = int(round((math.pi / 2) / w_turn / dt))
        t = np.arange(n_straight + n_turn) * dt
        v_arr = np.full(t.size, v)
        w_arr = np.concatenate([np.zeros(n_straight), np.full(n_turn, w_turn)])
        # positions are irrelevant to the radius computation as long as the
        # path stays before the corner waypoint
        r1 = np.cumsum(v_arr * dt) * 0.001
        r2 = np.zeros(t.size)
        st = trajectory_stats(
            t, r1, r2, v_arr, w_arr, ReferencePath.left_turn(corner=10.0), t[-1] - t[0]
        )
        assert st.turn_radius_m == pytest.approx(v / w_turn, rel=0.005)
        assert st.mean_turn_rate_radps == pytest.approx(w_turn, rel=0.005)

    def test_translation_invariance(self):
        t, r1, r2, v, w = straight_log(offset=1e-3)
        base = trajectory_stats(t, r1, r2, v, w, ReferencePath.rectilinear(), 10.0)
        shifted_path = ReferencePath(
            tuple(
                type(s)(heading=s.heading, target=s.target + 0.5, waypoint=s.waypoint)
                for s in ReferencePath.rectilinear().segments
            ),
            "rectilinear",
        )
        moved = trajectory_stats(t, r1, r2 + 0.5, v, w, shifted_path, 10.0)
        assert moved.rms_error_m == pytest.approx(base.rms_error_m, abs=1e-12)

    def test_short_log_rejected(self):
        t, r1, r2, v, w = straight_log(n=11)
        with pytest.raises(DomainError):
            trajectory_stats(t, r1, r2, v, w, ReferencePath.rectilinear(), 10.0)
