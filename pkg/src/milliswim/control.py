"""Cascaded trajectory-tracking controller.

A lateral-position controller (PI) converts the cross-track error along the
active path segment into a desired heading; a proportional heading controller
converts the heading error into a steering input u_psi; the actuator mapping
adds u_psi to one channel's duty cycle and subtracts it from the other,
clamped to [0, u_max]. Positive u_psi (counterclockwise demand) biases the
left channel, since left-unimorph excitation produces a left turn.

Reference paths are sequences of axis-aligned segments. Each segment tracks
one lateral coordinate (r1 or r2) while progressing along the other; segment
switching triggers when the along-path coordinate passes the waypoint, and
the integrator resets at the switch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .actuator import DEFAULT_ON_HEIGHT_V, ExcitationCommand
from .plant import wrap_angle


@dataclass(frozen=True)
class ControlConfig:
    k_p: float = 3.0          # rad/m
    k_i: float = 1.0          # rad/(m*s)
    k_p_psi: float = 2.0      # 1/rad
    u_v: float = 0.11         # per-unit speed reference
    u_max: float = 0.22       # per-unit duty saturation bound
    freq: float = 3.0         # Hz, actuation frequency
    loop_rate: float = 250.0  # Hz, controller tick rate
    on_height: float = DEFAULT_ON_HEIGHT_V
    # Beyond the basic law: windup/demand safeguards, configurable and
    # disable-able (set to None) for the bare control law.
    psi_d_limit: float | None = math.pi / 2          # clamp on the LPC output
    integrator_limit: float | None = math.pi / 4     # clamp on |k_i * integral|

    def __post_init__(self):
        if min(self.k_p, self.k_i, self.k_p_psi) < 0:
            raise ValueError("gains must be nonnegative")
        if not 0.0 < self.u_v <= self.u_max <= 1.0:
            raise ValueError("require 0 < u_v <= u_max <= 1")
        if self.loop_rate <= 0 or self.freq <= 0:
            raise ValueError("freq and loop_rate must be positive")


@dataclass(frozen=True)
class PathSegment:
    """One axis-aligned leg of a reference path.

    heading: nominal travel direction, a multiple of pi/2.
    target: desired value of the lateral coordinate (the axis perpendicular
    to travel). waypoint: along-path coordinate value that ends the segment
    (None for a terminal segment).
    """

    heading: float
    target: float
    waypoint: float | None = None

    @property
    def lateral_axis(self) -> int:
        """1 or 2: the coordinate the segment holds at `target`."""
        return 1 if abs(math.sin(self.heading)) > 0.5 else 2

    @property
    def along_axis(self) -> int:
        return 2 if self.lateral_axis == 1 else 1

    @property
    def along_sign(self) -> float:
        """+1 when the along-path coordinate increases during travel."""
        c = math.cos(self.heading) if self.along_axis == 1 else math.sin(self.heading)
        return 1.0 if c >= 0 else -1.0

    @property
    def left_normal_sign(self) -> float:
        """Sign s such that s * (target - r_lat) is the error toward body-left."""
        # left normal of heading theta is (-sin(theta), cos(theta))
        if self.lateral_axis == 2:
            return 1.0 if math.cos(self.heading) >= 0 else -1.0
        return -1.0 if math.sin(self.heading) >= 0 else 1.0


@dataclass(frozen=True)
class ReferencePath:
    segments: tuple[PathSegment, ...]
    kind: str = "rectilinear"

    def __post_init__(self):
        if not self.segments:
            raise ValueError("path needs at least one segment")

    @staticmethod
    def rectilinear(length: float = 1.0) -> "ReferencePath":
        return ReferencePath(
            (PathSegment(heading=0.0, target=0.0, waypoint=length),), "rectilinear"
        )

    @staticmethod
    def left_turn(corner: float = 0.05, leg: float = 1.0) -> "ReferencePath":
        """Travel +n1 holding r2 = 0, then turn left and travel +n2 holding
        r1 = corner."""
        return ReferencePath(
            (
                PathSegment(heading=0.0, target=0.0, waypoint=corner),
                PathSegment(heading=math.pi / 2, target=corner, waypoint=leg),
            ),
            "left_turn",
        )

    @staticmethod
    def right_turn(corner: float = 0.05, leg: float = 1.0) -> "ReferencePath":
        """Travel +n1 holding r2 = 0, then turn right and travel -n2 holding
        r1 = corner."""
        return ReferencePath(
            (
                PathSegment(heading=0.0, target=0.0, waypoint=corner),
                PathSegment(heading=-math.pi / 2, target=corner, waypoint=-leg),
            ),
            "right_turn",
        )

    def advance(self, index: int, r1: float, r2: float) -> int:
        """Active segment index after checking waypoint crossings at (r1, r2)."""
        while index < len(self.segments) - 1:
            seg = self.segments[index]
            if seg.waypoint is None:
                break
            along = r1 if seg.along_axis == 1 else r2
            if seg.along_sign * (along - seg.waypoint) >= 0.0:
                index += 1
            else:
                break
        return index


@dataclass
class ControllerState:
    integrator: float = 0.0   # m*s, accumulated cross-track error
    active_segment: int = 0


def lateral_error(
    path: ReferencePath, st: ControllerState, r1: float, r2: float
) -> tuple[float, int]:
    """Lateral error r_e,j = r_d,j - r_j along the active segment's axis.

    Advances st.active_segment past crossed waypoints first, resetting the
    integrator on a switch. Returns (r_e, j).
    """
    idx = path.advance(st.active_segment, r1, r2)
    if idx != st.active_segment:
        st.active_segment = idx
        st.integrator = 0.0
    seg = path.segments[idx]
    r_j = r1 if seg.lateral_axis == 1 else r2
    return seg.target - r_j, seg.lateral_axis


def lpc_step(cfg: ControlConfig, st: ControllerState, r_e: float, dt: float) -> float:
    """PI lateral-position law: psi_d = k_p*r_e + k_i*integral(r_e).

    The integral uses the rectangular rule at the loop rate. The output (and
    integrator, indirectly) are clamped when the respective limits are set.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    st.integrator += r_e * dt
    if cfg.integrator_limit is not None and cfg.k_i > 0:
        bound = cfg.integrator_limit / cfg.k_i
        st.integrator = min(max(st.integrator, -bound), bound)
    psi_d = cfg.k_p * r_e + cfg.k_i * st.integrator
    if cfg.psi_d_limit is not None:
        psi_d = min(max(psi_d, -cfg.psi_d_limit), cfg.psi_d_limit)
    return psi_d


def heading_step(cfg: ControlConfig, psi_d: float, psi: float) -> float:
    """Proportional heading law on the wrapped heading error."""
    return cfg.k_p_psi * wrap_angle(psi_d - psi)


def actuator_mapping(cfg: ControlConfig, u_v: float, u_psi: float) -> tuple[float, float]:
    """Split the steering input across the two channels with saturation."""
    u_l = min(max(u_v + u_psi, 0.0), cfg.u_max)
    u_r = min(max(u_v - u_psi, 0.0), cfg.u_max)
    return u_l, u_r


def closed_loop_tick(
    cfg: ControlConfig,
    path: ReferencePath,
    st: ControllerState,
    r1: float,
    r2: float,
    psi: float,
    dt: float,
) -> ExcitationCommand:
    """One control tick: LPC -> heading controller -> actuator mapping.

    The LPC correction is applied about the active segment's nominal heading,
    signed so that a positive body-left cross-track error steers left. For
    the rectilinear path (heading 0, lateral axis 2) this reduces to the bare
    PI law on r_e,2.
    """
    r_e, _ = lateral_error(path, st, r1, r2)
    seg = path.segments[st.active_segment]
    e_left = seg.left_normal_sign * r_e
    psi_d = wrap_angle(seg.heading + lpc_step(cfg, st, e_left, dt))
    u_psi = heading_step(cfg, psi_d, psi)
    u_l, u_r = actuator_mapping(cfg, cfg.u_v, u_psi)
    return ExcitationCommand(
        freq=cfg.freq, dc_left=u_l, dc_right=u_r, on_height=cfg.on_height
    )
