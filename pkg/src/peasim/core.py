"""Physical parameters and memoryless relations of the actuator.

The actuator is a parallel elastic actuator whose spring equilibrium is
moved by a small motor through a self-locking worm drive.  Everything in
this module is algebra on the two shaft coordinates:

    q_M   main shaft / load angle                [rad]
    q_m   small (adjuster) motor shaft angle     [rad]

All quantities are rotational throughout the package: inertias in
kg*m^2, torques in Nm, angles in rad.  The spring couples the two shafts
through the worm drive (ratio ``n``), so its deflection is
``q_M - q_m / n`` and the torque it applies to the small-motor shaft is
the load-side torque divided by ``-n``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

__all__ = [
    "OperationMode",
    "ActuatorParams",
    "ActuatorState",
    "DesignRatioWarning",
    "FORCE_RATIO_WARN_THRESHOLD",
    "equivalent_inertia_load",
    "equivalent_inertia_adjuster",
    "spring_deflection",
    "spring_torques",
    "equilibrium_position",
    "spring_energy",
    "validate_design",
]


class OperationMode(enum.Enum):
    """Discrete operation mode of the actuator.

    PARALLEL_ELASTIC: the small motor is off and the worm drive self-locks,
    so the spring acts against a fixed equilibrium angle.
    VIRTUAL_DIRECT_DRIVE: the small motor actively keeps the spring
    undeformed, so the main motor sees a springless plant.
    """

    PARALLEL_ELASTIC = "PE"
    VIRTUAL_DIRECT_DRIVE = "VDD"

    def __str__(self) -> str:  # CSV / log label
        return self.value


class DesignRatioWarning(UserWarning):
    """The adjuster-to-main force ratio is not small; sizing is questionable."""


#: ``validate_design`` warns when n * m_eq / M_eq reaches this value.  At the
#: threshold the adjuster motor must supply 10% of the main motor's torque
#: while tracking, which defeats the point of a small adjuster.
FORCE_RATIO_WARN_THRESHOLD = 0.1


@dataclass(frozen=True)
class ActuatorParams:
    """Constant physical parameters of one actuator.

    Immutable after construction; all downstream code assumes the
    invariants checked here.

    Attributes:
        M_motor: rotor inertia of the main motor [kg*m^2].
        M_load: fixed load-side inertia reflected to the main shaft
            [kg*m^2] (payload inertia that varies during a run is carried
            by the load model instead).
        m_motor: rotor inertia of the small adjuster motor [kg*m^2].
        m_worm: inertia of the worm [kg*m^2].
        m_wormwheel: inertia of the worm wheel [kg*m^2] (reflected to the
            small-motor shaft through n^2).
        n: worm-drive transmission ratio (>= 1, dimensionless).
        k: torsional spring stiffness [Nm/rad].
        alpha: pole of the desired spring-deflection dynamics [1/s];
            larger values null the spring faster.
        tau_M_max: main-motor torque saturation [Nm].
        tau_m_max: adjuster-motor torque saturation, at its own shaft [Nm].
        k_t_M: main-motor torque constant [Nm/A].
        k_t_m: adjuster-motor torque constant [Nm/A].
        V_supply: bus voltage used for the electrical power estimate [V].
        delta_l_max: spring deflection range limit [rad]; exceeding it is
            a simulation fault, not a clamp.
    """

    M_motor: float
    M_load: float
    m_motor: float
    m_worm: float
    m_wormwheel: float
    n: float
    k: float
    alpha: float
    tau_M_max: float
    tau_m_max: float
    k_t_M: float
    k_t_m: float
    V_supply: float
    delta_l_max: float

    def __post_init__(self) -> None:
        # Component inertias may individually be zero (e.g. an idealized
        # massless worm) but never negative; the load-side total must be
        # positive for the dynamics to be well posed.
        for name in ("M_motor", "M_load", "m_motor", "m_worm", "m_wormwheel"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.M_motor + self.M_load <= 0.0:
            raise ValueError("M_motor + M_load must be > 0")
        if self.n < 1.0:
            raise ValueError("n must be >= 1")
        if self.k <= 0.0:
            raise ValueError("k must be > 0")
        if self.alpha <= 0.0:
            raise ValueError("alpha must be > 0")
        if self.tau_M_max <= 0.0 or self.tau_m_max <= 0.0:
            raise ValueError("torque limits must be > 0")
        if self.k_t_M <= 0.0 or self.k_t_m <= 0.0:
            raise ValueError("torque constants must be > 0")
        if self.V_supply <= 0.0:
            raise ValueError("V_supply must be > 0")
        if self.delta_l_max <= 0.0:
            raise ValueError("delta_l_max must be > 0")


@dataclass(frozen=True)
class ActuatorState:
    """Continuous state plus the discrete operation mode at time ``t``.

    In PARALLEL_ELASTIC mode ``qd_m`` is exactly 0.0 by construction (the
    worm self-locks); the integrator freezes rather than integrates the
    adjuster coordinates in that mode.
    """

    q_M: float
    qd_M: float
    q_m: float
    qd_m: float
    mode: OperationMode
    t: float = 0.0

    def __post_init__(self) -> None:
        for name in ("q_M", "qd_M", "q_m", "qd_m", "t"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.mode is OperationMode.PARALLEL_ELASTIC and self.qd_m != 0.0:
            raise ValueError("qd_m must be exactly 0 in parallel elastic mode")


def equivalent_inertia_load(params: ActuatorParams) -> float:
    """Inertia seen by the main motor from its fixed attachments [kg*m^2]."""
    return params.M_motor + params.M_load


def equivalent_inertia_adjuster(params: ActuatorParams) -> float:
    """Inertia seen by the adjuster motor at its own shaft [kg*m^2].

    The worm wheel appears divided by n^2 because it turns n times slower
    than the worm.
    """
    return params.m_motor + params.m_worm + params.m_wormwheel / params.n**2


def spring_deflection(q_M: float, q_m: float, n: float) -> float:
    """Spring deflection ``q_M - q_m / n`` [rad]."""
    return q_M - q_m / n


def spring_torques(delta_l: float, params: ActuatorParams) -> tuple[float, float]:
    """Torques the spring applies to (main shaft, adjuster shaft) [Nm].

    The load side sees ``-k * delta_l``; the adjuster shaft sees the
    reaction reduced through the worm drive, ``k * delta_l / n``.  The two
    always satisfy tau_M = -n * tau_m.
    """
    tau_spring_M = -(params.k * delta_l)
    tau_spring_m = -tau_spring_M / params.n
    return tau_spring_M, tau_spring_m


def equilibrium_position(q_m: float, n: float) -> float:
    """Load angle at which the spring is relaxed, given the adjuster angle."""
    return q_m / n


def spring_energy(delta_l: float, params: ActuatorParams) -> float:
    """Elastic energy stored at deflection ``delta_l`` [J]."""
    return 0.5 * params.k * delta_l * delta_l


def validate_design(params: ActuatorParams) -> float:
    """Adjuster-to-main force ratio ``n * m_eq / M_eq`` for this design.

    A sound design keeps this ratio well below 1: while the spring is held
    undeformed the adjuster motor's torque is this fraction of the main
    motor's.  Emits :class:`DesignRatioWarning` when the ratio reaches
    :data:`FORCE_RATIO_WARN_THRESHOLD`.
    """
    ratio = params.n * equivalent_inertia_adjuster(params) / equivalent_inertia_load(params)
    if ratio >= FORCE_RATIO_WARN_THRESHOLD:
        warnings.warn(
            f"adjuster/main force ratio {ratio:.3g} >= {FORCE_RATIO_WARN_THRESHOLD}; "
            "the equilibrium-adjusting motor is not negligible for this design",
            DesignRatioWarning,
            stacklevel=2,
        )
    return ratio
