"""Swimming-efficiency metrics and trajectory statistics.

CoT = P / (m g v), St = f A / v, Re = v L / nu, Sw = 2 pi f A L / nu; the
identity Sw = 2 pi Re St holds by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .control import ControllerState, ReferencePath, lateral_error
from .errors import DomainError

# Swimmer constants used as defaults throughout.
DEFAULT_MASS_KG = 59e-6
DEFAULT_LENGTH_M = 36e-3
DEFAULT_G = 9.81
DEFAULT_NU = 1.0e-6  # m^2/s, water near 20 C


@dataclass(frozen=True)
class SwimmerSpec:
    mass: float = DEFAULT_MASS_KG     # kg
    length: float = DEFAULT_LENGTH_M  # m
    g: float = DEFAULT_G              # m/s^2

    def __post_init__(self):
        if min(self.mass, self.length, self.g) <= 0:
            raise ValueError("mass, length and g must be positive")


def cost_of_transport(p_avg: float, spec: SwimmerSpec, v_avg: float) -> float:
    """CoT = P / (m g v): energy per unit weight per unit distance."""
    if v_avg <= 0:
        raise DomainError("v_avg must be positive")
    return p_avg / (spec.mass * spec.g * v_avg)


def strouhal(f_o: float, a_pp: float, v_avg: float) -> float:
    """St = f * A_pp / v."""
    if v_avg <= 0:
        raise DomainError("v_avg must be positive")
    return f_o * a_pp / v_avg


def reynolds(v_avg: float, length: float, nu: float = DEFAULT_NU) -> float:
    """Re = v * L / nu."""
    if nu <= 0:
        raise DomainError("nu must be positive")
    return v_avg * length / nu


def swim_number(f_o: float, a_pp: float, length: float, nu: float = DEFAULT_NU) -> float:
    """Sw = 2 pi f A_pp L / nu = 2 pi Re St."""
    if nu <= 0:
        raise DomainError("nu must be positive")
    return 2.0 * math.pi * f_o * a_pp * length / nu


@dataclass
class TrajectoryStats:
    rms_error_m: float
    mean_speed_mps: float
    mean_turn_rate_radps: float
    turn_radius_m: float  # nan when there is no turning content

    def as_dict(self) -> dict:
        return {
            "rms_error_m": self.rms_error_m,
            "mean_speed_mps": self.mean_speed_mps,
            "mean_turn_rate_radps": self.mean_turn_rate_radps,
            "turn_radius_m": None if math.isnan(self.turn_radius_m) else self.turn_radius_m,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def metrics_summary(cot, st, re, sw) -> dict:
    """Efficiency summary with the canonical field names."""
    return {"cot": cot, "st": st, "re": re, "sw": sw}


def format_table(summary: dict) -> str:
    """Aligned two-column text table of a summary dict."""
    width = max(len(k) for k in summary)
    lines = []
    for k, v in summary.items():
        sv = "n/a" if v is None else (f"{v:.6g}" if isinstance(v, float) else str(v))
        lines.append(f"{k:<{width}}  {sv}")
    return "\n".join(lines)


def _turning_window(omega: np.ndarray, frac: float = 0.8) -> np.ndarray:
    """Boolean mask of the contiguous run around the |omega| peak where
    |omega| stays above frac * peak."""
    a = np.abs(omega)
    peak = a.max()
    mask = np.zeros(a.size, dtype=bool)
    if peak <= 0:
        return mask
    k = int(np.argmax(a))
    lo = k
    while lo > 0 and a[lo - 1] >= frac * peak:
        lo -= 1
    hi = k
    while hi < a.size - 1 and a[hi + 1] >= frac * peak:
        hi += 1
    mask[lo : hi + 1] = True
    return mask


def trajectory_stats(
    t: np.ndarray,
    r1: np.ndarray,
    r2: np.ndarray,
    v: np.ndarray,
    omega: np.ndarray,
    path: ReferencePath,
    window: float,
) -> TrajectoryStats:
    """Tracking statistics over the trailing `window` seconds of a log.

    The RMS error uses the per-sample lateral error along the active
    segment's axis, replaying the path's own segment-switching rule. Turn
    rate and radius are taken over the contiguous peak-yaw-rate window (the
    main turning arc); on paths without turning content the radius is nan.
    """
    t = np.asarray(t, dtype=float)
    if t.size == 0 or t[-1] - t[0] < window:
        raise DomainError("log does not span the requested window")
    sel = t >= t[-1] - window

    st = ControllerState()
    errs = np.empty(t.size)
    for k in range(t.size):
        errs[k], _ = lateral_error(path, st, float(r1[k]), float(r2[k]))

    rms = float(np.sqrt(np.mean(errs[sel] ** 2)))
    mean_speed = float(np.mean(v[sel]))

    if path.kind == "rectilinear":
        return TrajectoryStats(
            rms_error_m=rms,
            mean_speed_mps=mean_speed,
            mean_turn_rate_radps=float(np.mean(np.asarray(omega)[sel])),
            turn_radius_m=math.nan,
        )

    turn = _turning_window(np.asarray(omega)[sel], frac=0.9)
    if turn.any():
        w_turn = np.asarray(omega)[sel][turn]
        v_turn = np.asarray(v)[sel][turn]
        mean_rate = float(np.mean(w_turn))
        # median of the per-sample osculating radius: robust against the
        # first-order-lag ramp at the ends of the arc
        radius = float(np.median(v_turn / np.abs(w_turn)))
    else:
        mean_rate = 0.0
        radius = math.nan
    return TrajectoryStats(
        rms_error_m=rms,
        mean_speed_mps=mean_speed,
        mean_turn_rate_radps=mean_rate,
        turn_radius_m=radius,
    )
