"""Ackermann (kinematic bicycle) vehicle model."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numba

from ..errors import ConfigurationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class VehicleParams:
    L: float = 0.8
    v_max: float = 8.0
    a_max: float = 8.0
    phi_max: float = 0.6
    footprint_radius: float = 0.4

    def __post_init__(self):
        for name in ("L", "v_max", "a_max", "phi_max", "footprint_radius"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"vehicle {name} must be positive")
        if self.phi_max >= math.pi / 2:
            raise ConfigurationError("phi_max must be below pi/2")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class AgentState:
    x: float
    y: float
    theta: float = 0.0
    v: float = 0.0

    @property
    def pose(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    def to_list(self) -> list:
        return [self.x, self.y, self.theta, self.v]


@dataclass(frozen=True)
class ControlInput:
    a: float = 0.0
    phi: float = 0.0


@numba.njit(cache=True)
def _wrap(theta):
    # in-range angles pass through untouched so the round trip is exact
    if -math.pi < theta <= math.pi:
        return theta
    w = (theta + math.pi) % (2.0 * math.pi) - math.pi
    if w == -math.pi:
        w = math.pi
    return w


def wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    return float(_wrap(float(theta)))


# Compiled trig can differ from CPython's libm by an ulp (fused sincos), so the
# Python API and the DWA rollout kernel share this one implementation.
@numba.njit(cache=True)
def euler_step(x, y, theta, v, a, phi, dt, L, v_max):
    nx = x + v * math.cos(theta) * dt
    ny = y + v * math.sin(theta) * dt
    nt = _wrap(theta + v * math.tan(phi) / L * dt)
    nv = min(max(v + a * dt, -v_max), v_max)
    return nx, ny, nt, nv


def step_kinematics(state: AgentState, u: ControlInput, dt: float, params: VehicleParams) -> AgentState:
    """One explicit-Euler step of x' = v cos(theta), y' = v sin(theta), v' = a, theta' = v tan(phi) / L.

    All derivatives are evaluated at the current state. Speed is clamped to
    [-v_max, v_max] after the update.
    """
    x, y, theta, v = euler_step(
        float(state.x), float(state.y), float(state.theta), float(state.v),
        float(u.a), float(u.phi), float(dt), float(params.L), float(params.v_max),
    )
    return AgentState(x, y, theta, v)
