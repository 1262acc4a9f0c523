"""Dual-channel PWM excitation model for the bimorph tail actuator.

Both channels share the excitation frequency and on-height voltage; the right
channel's on-window is shifted by half a period (antiphase). Average electrical
power follows the measured linear fit P(DC) = 720*DC mW for symmetric bimorph
drive, split evenly between the two supplies.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .tables import BilinearTable

DEFAULT_ON_HEIGHT_V = 4.0      # on-height for ~250 mA nominal channel current
POWER_FIT_W_PER_DC = 0.720     # symmetric-bimorph power slope, W per unit DC


class Mode(enum.Enum):
    BIMORPH = "bimorph"
    UNIMORPH_LEFT = "unimorph_left"
    UNIMORPH_RIGHT = "unimorph_right"
    MIXED = "mixed"
    IDLE = "idle"


@dataclass(frozen=True)
class ExcitationCommand:
    """One PWM excitation: shared frequency/on-height, per-channel duty cycles."""

    freq: float                       # Hz
    dc_left: float                    # per-unit in [0, 1]
    dc_right: float                   # per-unit in [0, 1]
    on_height: float = DEFAULT_ON_HEIGHT_V  # volts

    def __post_init__(self):
        if self.freq <= 0:
            raise ValueError(f"freq must be positive, got {self.freq}")
        if self.on_height <= 0:
            raise ValueError(f"on_height must be positive, got {self.on_height}")
        for name, dc in (("dc_left", self.dc_left), ("dc_right", self.dc_right)):
            if not 0.0 <= dc <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {dc}")


def waveform_sample(cmd: ExcitationCommand, t: float) -> tuple[float, float]:
    """Instantaneous channel voltages at time t (s).

    The left on-window starts at each period boundary; the right one starts
    half a period later (180 degree phase shift).
    """
    import math

    phase = math.fmod(t * cmd.freq, 1.0)
    left = cmd.on_height if phase < cmd.dc_left else 0.0
    phase_r = (phase + 0.5) % 1.0
    right = cmd.on_height if phase_r < cmd.dc_right else 0.0
    return left, right


def classify_mode(cmd: ExcitationCommand) -> Mode:
    if cmd.dc_left == 0.0 and cmd.dc_right == 0.0:
        return Mode.IDLE
    if cmd.dc_left == cmd.dc_right:
        return Mode.BIMORPH
    if cmd.dc_right == 0.0:
        return Mode.UNIMORPH_LEFT
    if cmd.dc_left == 0.0:
        return Mode.UNIMORPH_RIGHT
    return Mode.MIXED


def average_power(cmd: ExcitationCommand) -> float:
    """Average electrical power in W, linear in each channel's duty cycle.

    Per-channel convention: half the symmetric-bimorph fit, so bimorph drive
    at duty DC reproduces 720*DC mW and a single unimorph channel draws half.
    """
    return 0.5 * POWER_FIT_W_PER_DC * (cmd.dc_left + cmd.dc_right)


class ExcursionTable(BilinearTable):
    """(freq, dc) -> peak-to-peak tail excursion A_pp in mm, with per-point ESD."""

    @classmethod
    def from_csv(cls, path) -> "ExcursionTable":
        """Load from a calibration CSV with columns
        freq_hz, dc_pu, app_mm, esd_mm, provenance."""
        rows = []
        with open(path, newline="") as f:
            for rec in csv.DictReader(f):
                rows.append(
                    (float(rec["freq_hz"]), float(rec["dc_pu"]), float(rec["app_mm"]),
                     float(rec["esd_mm"]), rec["provenance"])
                )
        freqs = sorted({r[0] for r in rows})
        dcs = sorted({r[1] for r in rows})
        app = np.full((len(freqs), len(dcs)), np.nan)
        esd = np.zeros_like(app)
        prov = np.full(app.shape, "digitized", dtype=object)
        fi = {f: i for i, f in enumerate(freqs)}
        di = {d: j for j, d in enumerate(dcs)}
        for f_, d_, a_, e_, p_ in rows:
            app[fi[f_], di[d_]] = a_
            esd[fi[f_], di[d_]] = e_
            prov[fi[f_], di[d_]] = p_
        if np.any(np.isnan(app)):
            raise ValueError(f"excursion grid in {path} is not rectangular")
        if np.any(app < 0):
            raise ValueError("excursions must be nonnegative")
        return cls(freqs, dcs, app, aux=esd, provenance=prov)


def excursion(table: ExcursionTable, freq: float, dc: float) -> float:
    """Interpolated peak-to-peak excursion A_pp in mm; exact at grid nodes."""
    return table(freq, dc)


def default_excursion_table() -> ExcursionTable:
    """Excursion calibration shipped with the package."""
    with resources.as_file(resources.files("milliswim.data") / "excursion.csv") as p:
        return ExcursionTable.from_csv(p)
