"""Exception types raised by the simulator."""


class PeasimError(Exception):
    """Base class for all package errors."""


class ConfigError(PeasimError):
    """Invalid or unreadable configuration (file or field values)."""


class ScenarioError(PeasimError):
    """Invalid scenario script (bad phase sequence or parameters)."""


class SimulationFault(PeasimError):
    """A run was aborted because the physical model left its valid domain."""

    def __init__(self, message: str, phase_index: int | None = None):
        if phase_index is not None:
            message = f"{message} (scenario phase {phase_index})"
        super().__init__(message)
        self.phase_index = phase_index


class SpringOverdeflectionError(SimulationFault):
    """|deflection| exceeded the spring's rated range; the hardware would be damaged."""


class NonFiniteStateError(SimulationFault):
    """The integrator produced a NaN or infinity."""


class ScriptedTorqueRangeError(SimulationFault):
    """A scripted torque table was queried outside its time range."""


class NoStaticEquilibriumError(SimulationFault):
    """The external load exceeds what the spring can hold anywhere in range."""


class SettleTimeoutError(SimulationFault):
    """A settle-wait phase did not reach its velocity tolerance in time."""
