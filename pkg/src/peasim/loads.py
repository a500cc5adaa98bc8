"""External load models attached to the main shaft.

Three kinds of load are supported: no load, a gravity pendulum (a
uniform bar with an optional point payload on it), and a scripted torque
given as a piecewise-linear function of time.  The gravity convention
puts q_M = 0 at the horizontal bar with positive angles raising it, so
the gravity moment is largest in magnitude at q_M = 0 and vanishes when
the bar is vertical.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, replace

from .errors import ScriptedTorqueRangeError

__all__ = [
    "LoadKind",
    "LoadModel",
    "load_inertia",
    "gravity_moment",
    "external_torque",
    "with_payload",
    "without_payload",
]

STANDARD_GRAVITY = 9.81


class LoadKind(enum.Enum):
    NONE = "none"
    GRAVITY_PENDULUM = "gravity_pendulum"
    SCRIPTED = "scripted"


@dataclass(frozen=True)
class LoadModel:
    """Immutable description of the external load on the main shaft.

    Use the classmethod constructors; the raw constructor does not guard
    against mixing fields of different kinds.

    Attributes:
        kind: which torque law applies.
        m_bar: bar mass [kg], center of mass at l_bar / 2.
        l_bar: bar length [m].
        m_payload: point payload mass [kg].
        l_payload: payload lever arm from the shaft [m].
        g: gravitational acceleration [m/s^2].
        table_t: sample times for the scripted torque [s], strictly increasing.
        table_tau: torque samples [Nm], linearly interpolated between times.
    """

    kind: LoadKind
    m_bar: float = 0.0
    l_bar: float = 0.0
    m_payload: float = 0.0
    l_payload: float = 0.0
    g: float = STANDARD_GRAVITY
    table_t: tuple[float, ...] = ()
    table_tau: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        for name in ("m_bar", "l_bar", "m_payload", "l_payload"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.g <= 0.0:
            raise ValueError("g must be > 0")
        if self.kind is LoadKind.SCRIPTED:
            if len(self.table_t) < 2 or len(self.table_t) != len(self.table_tau):
                raise ValueError("scripted load needs matching tables with >= 2 points")
            if any(not math.isfinite(v) for v in self.table_t + self.table_tau):
                raise ValueError("scripted table values must be finite")
            if any(b <= a for a, b in zip(self.table_t, self.table_t[1:])):
                raise ValueError("scripted table times must be strictly increasing")
        elif self.table_t or self.table_tau:
            raise ValueError("torque table is only valid for scripted loads")

    @classmethod
    def none(cls) -> "LoadModel":
        """A free shaft: zero external torque and zero added inertia."""
        return cls(kind=LoadKind.NONE)

    @classmethod
    def gravity_pendulum(
        cls,
        m_bar: float,
        l_bar: float,
        m_payload: float = 0.0,
        l_payload: float = 0.0,
        g: float = STANDARD_GRAVITY,
    ) -> "LoadModel":
        """A uniform bar on the shaft, optionally carrying a point payload."""
        return cls(
            kind=LoadKind.GRAVITY_PENDULUM,
            m_bar=m_bar,
            l_bar=l_bar,
            m_payload=m_payload,
            l_payload=l_payload,
            g=g,
        )

    @classmethod
    def scripted(cls, times, torques) -> "LoadModel":
        """A torque profile tau(t) defined by linear interpolation.

        Queries outside [times[0], times[-1]] raise
        :class:`ScriptedTorqueRangeError` instead of extrapolating.
        """
        return cls(
            kind=LoadKind.SCRIPTED,
            table_t=tuple(float(t) for t in times),
            table_tau=tuple(float(v) for v in torques),
        )


def load_inertia(load: LoadModel) -> float:
    """Rotational inertia the load adds to the main shaft [kg*m^2].

    Bar about its end plus payload as a point mass; zero for the other
    load kinds.
    """
    if load.kind is not LoadKind.GRAVITY_PENDULUM:
        return 0.0
    return load.m_bar * load.l_bar**2 / 3.0 + load.m_payload * load.l_payload**2


def gravity_moment(load: LoadModel, q_M: float) -> float:
    """Gravity torque on the main shaft at angle ``q_M`` [Nm].

    Negative at q_M = 0 (gravity pulls the horizontal bar down); zero for
    non-pendulum loads.
    """
    if load.kind is not LoadKind.GRAVITY_PENDULUM:
        return 0.0
    moment = load.m_bar * load.g * load.l_bar / 2.0 + load.m_payload * load.g * load.l_payload
    return -(moment * math.cos(q_M))


def external_torque(load: LoadModel, q_M: float, t: float) -> float:
    """External torque applied to the main shaft at angle q_M, time t [Nm]."""
    if load.kind is LoadKind.NONE:
        return 0.0
    if load.kind is LoadKind.GRAVITY_PENDULUM:
        return gravity_moment(load, q_M)
    # Scripted: linear interpolation, strict range check.
    ts = load.table_t
    if t < ts[0] or t > ts[-1]:
        raise ScriptedTorqueRangeError(
            f"scripted torque queried at t={t!r} outside [{ts[0]!r}, {ts[-1]!r}]"
        )
    i = bisect.bisect_right(ts, t)
    if i == len(ts):
        return load.table_tau[-1]
    t0, t1 = ts[i - 1], ts[i]
    v0, v1 = load.table_tau[i - 1], load.table_tau[i]
    return v0 + (v1 - v0) * ((t - t0) / (t1 - t0))


def with_payload(load: LoadModel, m_payload: float, l_payload: float) -> LoadModel:
    """The same pendulum carrying a (different) point payload."""
    if load.kind is not LoadKind.GRAVITY_PENDULUM:
        raise ValueError("payloads can only be attached to a gravity pendulum load")
    return replace(load, m_payload=m_payload, l_payload=l_payload)


def without_payload(load: LoadModel) -> LoadModel:
    """The same pendulum with the payload removed."""
    if load.kind is not LoadKind.GRAVITY_PENDULUM:
        raise ValueError("payloads can only be attached to a gravity pendulum load")
    return replace(load, m_payload=0.0, l_payload=0.0)
