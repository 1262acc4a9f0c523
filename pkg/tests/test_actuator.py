import csv

import numpy as np
import pytest

from milliswim.actuator import (
    ExcitationCommand,
    ExcursionTable,
    Mode,
    average_power,
    classify_mode,
    default_excursion_table,
    excursion,
    waveform_sample,
)
from milliswim.errors import CalibrationRangeError


class TestWaveform:
    def test_left_window(self):
        cmd = ExcitationCommand(freq=1.0, dc_left=0.1, dc_right=0.1, on_height=4.0)
        assert waveform_sample(cmd, 0.05) == (4.0, 0.0)

    def test_right_window(self):
        cmd = ExcitationCommand(freq=1.0, dc_left=0.1, dc_right=0.1, on_height=4.0)
        assert waveform_sample(cmd, 0.55) == (0.0, 4.0)

    def test_zero_duty_channel_stays_off(self):
        cmd = ExcitationCommand(freq=1.0, dc_left=0.0, dc_right=0.2)
        for t in np.linspace(0.0, 3.0, 301):
            assert waveform_sample(cmd, t)[0] == 0.0

    def test_periodicity(self):
        # midpoint grid: no sample coincides with a PWM window edge, so the
        # comparison is insensitive to floating-point phase rounding
        cmd = ExcitationCommand(freq=2.5, dc_left=0.13, dc_right=0.31)
        ts = (np.arange(10_000) + 0.5) / 10_000 / cmd.freq
        for t in ts:
            assert waveform_sample(cmd, t) == waveform_sample(cmd, t + 1.0 / cmd.freq)

    def test_duty_consistency(self):
        # duty cycles aligned to the midpoint sampling grid, so the time
        # average over one period is exact
        n = 10_000
        cmd = ExcitationCommand(freq=2.0, dc_left=0.07, dc_right=0.21)
        ts = (np.arange(n) + 0.5) / n / cmd.freq
        acc = np.zeros(2)
        for t in ts:
            acc += waveform_sample(cmd, t)
        avg = acc / n
        assert avg[0] == pytest.approx(cmd.on_height * cmd.dc_left, rel=1e-6)
        assert avg[1] == pytest.approx(cmd.on_height * cmd.dc_right, rel=1e-6)

    def test_antiphase_no_overlap(self):
        cmd = ExcitationCommand(freq=3.0, dc_left=0.5, dc_right=0.5)
        for t in np.linspace(0.0, 1.0, 10_000):
            l, r = waveform_sample(cmd, t)
            assert not (l > 0 and r > 0)

    def test_validation(self):
        with pytest.raises(ValueError):
            ExcitationCommand(freq=0.0, dc_left=0.1, dc_right=0.1)
        with pytest.raises(ValueError):
            ExcitationCommand(freq=1.0, dc_left=1.2, dc_right=0.1)
        with pytest.raises(ValueError):
            ExcitationCommand(freq=1.0, dc_left=0.1, dc_right=0.1, on_height=0.0)


class TestClassifyMode:
    @pytest.mark.parametrize(
        "dcl,dcr,mode",
        [
            (0.10, 0.10, Mode.BIMORPH),
            (0.12, 0.00, Mode.UNIMORPH_LEFT),
            (0.00, 0.15, Mode.UNIMORPH_RIGHT),
            (0.00, 0.00, Mode.IDLE),
            (0.08, 0.14, Mode.MIXED),
        ],
    )
    def test_modes(self, dcl, dcr, mode):
        assert classify_mode(ExcitationCommand(freq=2.0, dc_left=dcl, dc_right=dcr)) is mode


class TestAveragePower:
    def test_bimorph_matches_linear_fit(self):
        cmd = ExcitationCommand(freq=5.0, dc_left=0.10, dc_right=0.10)
        assert average_power(cmd) == pytest.approx(0.072)

    def test_idle(self):
        assert average_power(ExcitationCommand(freq=1.0, dc_left=0.0, dc_right=0.0)) == 0.0

    def test_unimorph_half(self):
        cmd = ExcitationCommand(freq=2.0, dc_left=0.10, dc_right=0.0)
        assert average_power(cmd) == pytest.approx(0.036)

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 1.0])
    def test_linearity(self, alpha):
        base = ExcitationCommand(freq=2.0, dc_left=0.2, dc_right=0.1)
        scaled = ExcitationCommand(freq=2.0, dc_left=0.2 * alpha, dc_right=0.1 * alpha)
        assert average_power(scaled) == pytest.approx(alpha * average_power(base))

    def test_frequency_independent(self):
        a = ExcitationCommand(freq=1.0, dc_left=0.1, dc_right=0.1)
        b = ExcitationCommand(freq=5.0, dc_left=0.1, dc_right=0.1)
        assert average_power(a) == average_power(b)


class TestExcursionTable:
    def test_measured_maxima(self):
        t = default_excursion_table()
        assert excursion(t, 1.0, 0.06) == 7.80
        assert excursion(t, 2.0, 0.10) == 6.34
        assert excursion(t, 5.0, 0.10) == 3.75

    def test_every_node_exact(self):
        t = default_excursion_table()
        for i, f in enumerate(t.freqs):
            for j, d in enumerate(t.dcs):
                assert excursion(t, f, d) == t.values[i, j]

    def test_bilinear_midpoint(self):
        t = default_excursion_table()
        mid = excursion(t, 1.5, 0.095)
        corners = [excursion(t, f, d) for f in (1.0, 2.0) for d in (0.09, 0.10)]
        assert mid == pytest.approx(sum(corners) / 4.0)

    def test_no_silent_extrapolation(self):
        t = default_excursion_table()
        with pytest.raises(CalibrationRangeError):
            excursion(t, 6.0, 0.05)
        with pytest.raises(CalibrationRangeError):
            excursion(t, 2.0, 0.005)

    def test_csv_roundtrip(self, tmp_path):
        p = tmp_path / "exc.csv"
        with open(p, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["freq_hz", "dc_pu", "app_mm", "esd_mm", "provenance"])
            for fr in (1.0, 2.0):
                for dc, app in ((0.05, 3.0), (0.10, 5.0)):
                    w.writerow([fr, dc, app * fr, 0.1, "text"])
        t = ExcursionTable.from_csv(p)
        assert excursion(t, 2.0, 0.10) == 10.0
        assert t.node_provenance(1.0, 0.05) == "text"
