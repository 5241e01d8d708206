"""Single-pulse propagators for the supported physical pulse models.

Resonant rectangular pulses have the closed form a = cos(A/2),
b = -i sin(A/2) with A the pulse area.  Everything else (rectangular with a
constant detuning, hyperbolic-secant pulses, chirped sech/tanh pulses) is
integrated numerically in the interaction picture, where the Hamiltonian is
purely off-diagonal,

    H(t) = (1/2) * Omega(t) * exp(-i D(t)) |1><2| + h.c.,
    D(t) = integral of Delta(t') from the window start to t,

so every propagator has unit determinant and the field-phase map of
:func:`cpgates.su2.with_phase` is exact for all pulse models.  The detuning
phase D(t) restarts at each pulse's own window start; a composite sequence
therefore sees one fixed constituent propagator, phased pulse by pulse.

Times are in arbitrary units; all physically meaningful inputs are the
dimensionless products (pulse area, Delta*T, Omega_0*T, B*T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import integrator
from .su2 import Propagator

__all__ = [
    "ConstantDetuning",
    "TanhChirp",
    "PulseSpec",
    "IntegratorConfig",
    "IntegrationError",
    "DEFAULT_CONFIG",
    "resonant_rect_propagator",
    "integrate_pulse",
    "constituent_propagator",
    "transition_probability",
]

#: Default truncation of the sech window, in units of the width parameter T.
#: The neglected tail changes the propagator by about 2*Omega0*T*exp(-w),
#: which stays below 1e-8 for Omega0*T <= 20 at w = 25.
DEFAULT_WINDOW_HALF_WIDTH = 25.0


@dataclass(frozen=True)
class ConstantDetuning:
    """Constant detuning Delta (rad/time) between field and transition."""

    detuning: float = 0.0


@dataclass(frozen=True)
class TanhChirp:
    """Detuning swept as Delta(t) = chirp_rate * tanh(t/T) through resonance."""

    chirp_rate: float


DetuningModel = Union[ConstantDetuning, TanhChirp]


@dataclass(frozen=True)
class PulseSpec:
    """One constituent pulse of a composite sequence.

    Parameters
    ----------
    shape : {"rectangular", "sech"}
        Envelope model.  Rectangular pulses run over [0, duration] at
        constant peak_rabi; sech pulses are Omega(t) = peak_rabi * sech(t/T)
        with T = duration (the width parameter, not the full length),
        integrated over [-w*T, +w*T] with w = window_half_width.
    peak_rabi : float
        Peak Rabi frequency Omega_0 >= 0, rad/time.
    duration : float
        Pulse length (rectangular) or sech width parameter, >= 0.  A zero
        duration degenerates to the identity propagator, which parameter
        sweeps starting at zero duration rely on.
    detuning_model : ConstantDetuning or TanhChirp
    window_half_width : float
        Sech truncation in units of T, >= 5.  Ignored for rectangular pulses.
    """

    shape: str
    peak_rabi: float
    duration: float
    detuning_model: DetuningModel = field(default_factory=ConstantDetuning)
    window_half_width: float = DEFAULT_WINDOW_HALF_WIDTH

    def __post_init__(self):
        if self.shape not in ("rectangular", "sech"):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if not isinstance(self.detuning_model, (ConstantDetuning, TanhChirp)):
            raise ValueError(f"unknown detuning model {self.detuning_model!r}")
        values = (self.peak_rabi, self.duration, self.window_half_width,
                  self._rate())
        if not all(math.isfinite(v) for v in values):
            raise ValueError("pulse parameters must be finite")
        if self.peak_rabi < 0:
            raise ValueError("peak_rabi must be nonnegative")
        if self.duration < 0:
            raise ValueError("duration must be nonnegative")
        if self.shape == "sech" and self.window_half_width < 5.0:
            raise ValueError("window_half_width must be at least 5")

    def _rate(self) -> float:
        model = self.detuning_model
        return model.detuning if isinstance(model, ConstantDetuning) else model.chirp_rate

    def area(self) -> float:
        """Pulse area: Omega0*duration (rectangular) or pi*Omega0*T (sech)."""
        if self.shape == "rectangular":
            return self.peak_rabi * self.duration
        return math.pi * self.peak_rabi * self.duration

    @classmethod
    def rectangular(cls, area: float, duration: float = 1.0,
                    detuning: float = 0.0) -> "PulseSpec":
        """Rectangular pulse of the given area with a constant detuning."""
        if duration <= 0:
            raise ValueError("duration must be positive to set an area")
        return cls("rectangular", area / duration, duration,
                   ConstantDetuning(detuning))

    @classmethod
    def sech(cls, peak_rabi: float, width: float = 1.0, detuning: float = 0.0,
             chirp_rate: float | None = None,
             window_half_width: float = DEFAULT_WINDOW_HALF_WIDTH) -> "PulseSpec":
        """Sech pulse; pass ``chirp_rate`` for the tanh-swept detuning model."""
        model: DetuningModel
        if chirp_rate is None:
            model = ConstantDetuning(detuning)
        else:
            if detuning:
                raise ValueError("give either a constant detuning or a chirp")
            model = TanhChirp(chirp_rate)
        return cls("sech", peak_rabi, width, model, window_half_width)


@dataclass(frozen=True)
class IntegratorConfig:
    """Accuracy contract for pulse integration.

    ``rel_tol``/``abs_tol`` bound the delivered propagator: its unitarity
    defect must stay below 10 * rel_tol.  Because local step control does
    not cap the accumulated error, the stepper internally runs 10x tighter
    than the requested tolerances to meet that bound with margin.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 100_000

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


DEFAULT_CONFIG = IntegratorConfig()


class IntegrationError(RuntimeError):
    """Raised when a pulse integration cannot meet its contract."""

    def __init__(self, message: str, *, achieved_defect: float | None = None,
                 n_steps: int | None = None):
        super().__init__(message)
        self.achieved_defect = achieved_defect
        self.n_steps = n_steps


def resonant_rect_propagator(area: float) -> Propagator:
    """Closed-form propagator of a resonant rectangular pulse of given area."""
    if not math.isfinite(area) or area < 0:
        raise ValueError("area must be finite and nonnegative")
    return Propagator(math.cos(area / 2.0), -1j * math.sin(area / 2.0))


def transition_probability(u: Propagator) -> float:
    """Population transferred by ``u`` starting from either bare state."""
    return float(abs(u.b) ** 2)


def _log_cosh(x: np.ndarray) -> np.ndarray:
    # overflow-safe ln cosh for large |x|
    ax = np.abs(x)
    return ax - math.log(2.0) + np.log1p(np.exp(-2.0 * ax))


def integrate_pulse_grid(
    shape: str,
    model: str,
    omega0: np.ndarray,
    duration: np.ndarray,
    rate: np.ndarray,
    window_half_width: float,
    config: IntegratorConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate a batch of pulses sharing one shape and detuning model.

    ``omega0``, ``duration`` and ``rate`` (constant detuning or chirp rate,
    depending on ``model``) are flat arrays of equal length.  Returns flat
    arrays (a, b) of Cayley-Klein parameters plus a boolean success mask.
    Zero-duration entries come back as the identity.
    """
    omega0 = np.asarray(omega0, dtype=float)
    duration = np.asarray(duration, dtype=float)
    rate = np.asarray(rate, dtype=float)
    m = omega0.size

    if shape == "rectangular":
        t_start = np.zeros(m)
        t_end = duration.copy()
    else:
        t_start = -window_half_width * duration
        t_end = window_half_width * duration
    # width enters only through t/width; keep zero-duration rows inert
    safe_width = np.where(duration > 0, duration, 1.0)

    if model == "constant":
        def phase_integral(t, idx):
            return rate[idx] * (t - t_start[idx])
    else:
        def phase_integral(t, idx):
            w = safe_width[idx]
            return rate[idx] * w * (_log_cosh(t / w) - _log_cosh(t_start[idx] / w))

    if shape == "rectangular":
        def envelope(t, idx):
            return omega0[idx]
    else:
        def envelope(t, idx):
            return omega0[idx] / np.cosh(t / safe_width[idx])

    def rhs(t, y, idx):
        # i dc/dt = H c with H = (1/2) Omega e^{-iD} |1><2| + h.c.
        half_coupling = 0.5 * envelope(t, idx) * np.exp(-1j * phase_integral(t, idx))
        out = np.empty_like(y)
        out[:, 0] = -1j * half_coupling * y[:, 1]
        out[:, 1] = -1j * np.conj(half_coupling) * y[:, 0]
        return out

    y0 = np.zeros((m, 2), dtype=np.complex128)
    y0[:, 0] = 1.0
    result = integrator.solve_batch(
        rhs, t_start, t_end, y0,
        0.1 * config.rel_tol, 0.1 * config.abs_tol, config.max_steps,
    )
    a = result.y[:, 0]
    b = -np.conj(result.y[:, 1])
    defect = np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1.0)
    ok = result.success & (defect <= 10.0 * config.rel_tol)
    return a, b, ok


def integrate_pulse(spec: PulseSpec,
                    config: IntegratorConfig = DEFAULT_CONFIG) -> Propagator:
    """Numerically integrated propagator of one pulse.

    Raises
    ------
    IntegrationError
        If the step budget is exhausted or the result drifts off the unit
        sphere by more than 10 * rel_tol.
    """
    model = "constant" if isinstance(spec.detuning_model, ConstantDetuning) else "tanh_chirp"
    a, b, ok = integrate_pulse_grid(
        spec.shape,
        model,
        np.array([spec.peak_rabi]),
        np.array([spec.duration]),
        np.array([spec._rate()]),
        spec.window_half_width,
        config,
    )
    prop = Propagator(complex(a[0]), complex(b[0]))
    if not ok[0]:
        raise IntegrationError(
            f"pulse integration failed (unitarity defect "
            f"{prop.unitarity_defect():.3e}, requested rel_tol {config.rel_tol:g})",
            achieved_defect=prop.unitarity_defect(),
        )
    return prop


def constituent_propagator(spec: PulseSpec,
                           config: IntegratorConfig = DEFAULT_CONFIG) -> Propagator:
    """Propagator of one constituent pulse, by the cheapest valid route.

    Resonant rectangular pulses use the closed form; every other model is
    integrated numerically.
    """
    if (
        spec.shape == "rectangular"
        and isinstance(spec.detuning_model, ConstantDetuning)
        and spec.detuning_model.detuning == 0.0
    ):
        return resonant_rect_propagator(spec.area())
    return integrate_pulse(spec, config)
