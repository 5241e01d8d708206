"""Parameter sweeps of composite-gate infidelity, plus diagnostic fits.

A scan instantiates the constituent pulse at every grid point, folds the
composite sequence algebraically over the whole grid at once, and records the
Frobenius infidelity against the ideal phase gate.  Grid points are pure
function evaluations: the grid is processed in fixed-size chunks whose
content never depends on the worker count, and results are stored by index,
so repeated runs and any number of workers produce bitwise-identical output.

Swept parameters are dimensionless and always refer to the template pulse's
duration T0:

    pulse_area_fraction   A/pi; sets peak_rabi so the area is A at T0
    peak_rabi_times_T     Omega0*T0; sets peak_rabi
    detuning_times_T      Delta*T0; sets the constant detuning
    duration_fraction     T/T0; scales the pulse length, all else fixed

CSV output carries the full metadata as '#'-prefixed header lines followed
by "x[,y],F" rows in scientific notation with 12 significant digits.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .pulses import (
    ConstantDetuning,
    DEFAULT_CONFIG,
    IntegratorConfig,
    PulseSpec,
    integrate_pulse_grid,
)
from .sequences import CompositePhases, PhaseGateSequence

__all__ = [
    "SweepAxis",
    "ScanResult",
    "ScanError",
    "PARAMETERS",
    "scan_1d",
    "scan_2d",
    "error_order",
    "high_fidelity_bandwidth",
    "write_scan_csv",
    "save_scan_csv",
    "read_scan_csv",
]

PARAMETERS = (
    "pulse_area_fraction",
    "detuning_times_T",
    "peak_rabi_times_T",
    "duration_fraction",
)

_MAX_SAMPLES = 10_000_000
_CHUNK = 4096  # fixed; must not depend on the worker count
_NOISE_FLOOR = 1e-13


class ScanError(RuntimeError):
    """Integration failed at specific grid coordinates."""

    def __init__(self, message: str, coordinates: tuple | None = None):
        super().__init__(message)
        self.coordinates = coordinates


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter: range, sample count and spacing."""

    parameter: str
    start: float
    stop: float
    samples: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValueError(
                f"unknown sweep parameter {self.parameter!r}; "
                f"choose from {', '.join(PARAMETERS)}"
            )
        if not (self.start < self.stop):
            raise ValueError("axis start must be below stop")
        if not (2 <= self.samples <= _MAX_SAMPLES):
            raise ValueError(f"samples must be in [2, {_MAX_SAMPLES}]")
        if self.spacing not in ("linear", "log"):
            raise ValueError("spacing must be 'linear' or 'log'")
        if self.spacing == "log" and self.start <= 0:
            raise ValueError("log spacing needs a positive start")

    def grid(self) -> np.ndarray:
        if self.spacing == "linear":
            return np.linspace(self.start, self.stop, self.samples)
        return np.geomspace(self.start, self.stop, self.samples)


@dataclass(frozen=True)
class ScanResult:
    """Sampled infidelity grid over one or two axes."""

    axes: tuple[SweepAxis, ...]
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = tuple(ax.samples for ax in self.axes)
        if self.values.shape != expected:
            raise ValueError(
                f"grid shape {self.values.shape} does not match axes {expected}"
            )


def _fold_gate(phases: Iterable[float], a: np.ndarray, b: np.ndarray):
    """Composite-sequence product, elementwise over grids of (a, b)."""
    ga = np.ones_like(a)
    gb = np.zeros_like(b)
    for phase in phases:
        bk = b * complex(math.cos(phase), math.sin(phase))
        ga, gb = a * ga - bk * np.conj(gb), a * gb + bk * np.conj(ga)
    return ga, gb


def _infidelity_grid(ga: np.ndarray, gb: np.ndarray, gate_phase: float) -> np.ndarray:
    # Frobenius distance to diag(e^{i*phi/2}, e^{-i*phi/2}); the two diagonal
    # and the two off-diagonal entries contribute equal moduli.
    target = complex(math.cos(gate_phase / 2.0), math.sin(gate_phase / 2.0))
    return np.sqrt(2.0 * np.abs(ga - target) ** 2 + 2.0 * np.abs(gb) ** 2)


def _template_fields(template: PulseSpec):
    if isinstance(template.detuning_model, ConstantDetuning):
        return "constant", template.detuning_model.detuning
    return "tanh_chirp", template.detuning_model.chirp_rate


def _apply_axes(template: PulseSpec, axes: tuple[SweepAxis, ...], mesh):
    """Per-sample pulse parameter arrays from the template and axis meshes."""
    t0 = template.duration
    if t0 <= 0:
        raise ValueError("scan templates need a positive duration")
    model, base_rate = _template_fields(template)

    params = [ax.parameter for ax in axes]
    if len(set(params)) != len(params):
        raise ValueError("scan axes must address distinct parameters")
    if {"pulse_area_fraction", "peak_rabi_times_T"} <= set(params):
        raise ValueError(
            "pulse_area_fraction and peak_rabi_times_T both control the "
            "peak Rabi frequency; sweep only one of them"
        )

    shape = np.broadcast_shapes(*(g.shape for g in mesh)) if mesh else ()
    omega0 = np.full(shape, template.peak_rabi, dtype=float)
    duration = np.full(shape, t0, dtype=float)
    rate = np.full(shape, base_rate, dtype=float)

    for ax, grid in zip(axes, mesh):
        if ax.parameter == "pulse_area_fraction":
            if template.shape == "rectangular":
                omega0 = grid * math.pi / t0
            else:
                omega0 = grid / t0  # sech area is pi * Omega0 * T
        elif ax.parameter == "peak_rabi_times_T":
            omega0 = grid / t0
        elif ax.parameter == "detuning_times_T":
            if model != "constant":
                raise ValueError(
                    "a detuning sweep requires the constant-detuning model"
                )
            rate = grid / t0
        elif ax.parameter == "duration_fraction":
            duration = grid * t0
    omega0, duration, rate = np.broadcast_arrays(omega0, duration, rate)
    return omega0, duration, rate, model


def _constituents(
    template: PulseSpec,
    omega0: np.ndarray,
    duration: np.ndarray,
    rate: np.ndarray,
    model: str,
    config: IntegratorConfig,
    workers: int,
    coords: tuple[np.ndarray, ...],
):
    """Cayley-Klein parameter grids of the constituent pulse, flat arrays."""
    flat_omega0 = omega0.ravel()
    flat_duration = duration.ravel()
    flat_rate = rate.ravel()
    m = flat_omega0.size

    # resonant rectangular samples always take the exact closed form, also
    # inside mixed grids (e.g. a detuning sweep passing through zero)
    exact = np.zeros(m, dtype=bool)
    if template.shape == "rectangular" and model == "constant":
        exact = flat_rate == 0.0
    a = np.empty(m, dtype=np.complex128)
    b = np.empty(m, dtype=np.complex128)
    if exact.any():
        half = 0.5 * flat_omega0[exact] * flat_duration[exact]
        a[exact] = np.cos(half)
        b[exact] = -1j * np.sin(half)
    todo = np.nonzero(~exact)[0]
    if todo.size == 0:
        return a, b

    ok = np.empty(todo.size, dtype=bool)

    def run(lo: int) -> None:
        hi = min(lo + _CHUNK, todo.size)
        sel = todo[lo:hi]
        a[sel], b[sel], ok[lo:hi] = integrate_pulse_grid(
            template.shape,
            model,
            flat_omega0[sel],
            flat_duration[sel],
            flat_rate[sel],
            template.window_half_width,
            config,
        )

    starts = range(0, todo.size, _CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    else:
        for lo in starts:
            run(lo)

    if not ok.all():
        bad = int(todo[np.nonzero(~ok)[0][0]])
        where = tuple(float(c.ravel()[bad]) for c in coords)
        raise ScanError(
            f"pulse integration failed at grid coordinates {where}",
            coordinates=where,
        )
    return a, b


def _metadata(seq: PhaseGateSequence, template: PulseSpec,
              config: IntegratorConfig) -> dict:
    model, rate = _template_fields(template)
    return {
        "family": seq.source.family,
        "variant": seq.source.variant,
        "gate_phase_pi": seq.gate_phase / math.pi,
        "pulse_shape": template.shape,
        "detuning_model": model,
        "peak_rabi": template.peak_rabi,
        "duration": template.duration,
        "detuning_rate": rate,
        "window_half_width": template.window_half_width,
        "rel_tol": config.rel_tol,
        "abs_tol": config.abs_tol,
    }


def _run_scan(
    axes: tuple[SweepAxis, ...],
    seq: PhaseGateSequence,
    template: PulseSpec,
    config: IntegratorConfig,
    workers: int,
) -> ScanResult:
    grids = [ax.grid() for ax in axes]
    mesh = np.meshgrid(*grids, indexing="ij") if len(grids) > 1 else [grids[0]]
    omega0, duration, rate, model = _apply_axes(template, axes, mesh)
    a, b = _constituents(
        template, omega0, duration, rate, model, config, workers,
        tuple(c for c in mesh),
    )
    ga, gb = _fold_gate(seq.phases, a, b)
    values = _infidelity_grid(ga, gb, seq.gate_phase)
    return ScanResult(
        axes=axes,
        values=values.reshape(omega0.shape),
        metadata=_metadata(seq, template, config),
    )


def scan_1d(
    axis: SweepAxis,
    seq: PhaseGateSequence,
    pulse_template: PulseSpec,
    config: IntegratorConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> ScanResult:
    """Infidelity curve along one swept parameter."""
    return _run_scan((axis,), seq, pulse_template, config, workers)


def scan_2d(
    axis_x: SweepAxis,
    axis_y: SweepAxis,
    seq: PhaseGateSequence,
    pulse_template: PulseSpec,
    config: IntegratorConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> ScanResult:
    """Infidelity map over the Cartesian grid of two distinct parameters.

    Values are row-major over (axis_x, axis_y): ``values[i, j]`` belongs to
    the i-th x sample and j-th y sample.
    """
    return _run_scan((axis_x, axis_y), seq, pulse_template, config, workers)


def error_order(
    seq: PhaseGateSequence | CompositePhases,
    perturbation: str,
    eps_range: tuple[float, float] = (1e-3, 1e-2),
    samples: int = 20,
    seed: int | None = None,
    config: IntegratorConfig = DEFAULT_CONFIG,
) -> float:
    """Fitted error-scaling exponent of a gate or of its composite pulse.

    Evaluates rectangular constituent pulses at the sequence's nominal area,
    perturbed by relative size eps, and fits the least-squares slope of
    log(metric) against log(eps) over log-spaced eps in ``eps_range``.  The
    metric is the gate infidelity for a :class:`PhaseGateSequence` and the
    surviving-amplitude modulus |a| for a bare :class:`CompositePhases`.

    ``perturbation`` is one of:

    - "area": pulse area scaled by (1 + eps) at zero detuning,
    - "detuning": Delta*T = eps at the nominal area,
    - "random_direction": a seeded unit direction in (relative area error,
      Delta*T) space, scaled by eps; requires ``seed``.

    Samples whose metric falls below the 1e-13 noise floor are excluded from
    the fit.  If fewer than two samples survive, a ValueError recommends a
    larger eps range.
    """
    lo, hi = eps_range
    if not (0 < lo < hi < 1):
        raise ValueError("eps_range must satisfy 0 < lo < hi < 1")
    if isinstance(seq, PhaseGateSequence):
        cp = seq.source
        phases = seq.phases
    else:
        cp = seq
        phases = seq.phases

    if perturbation == "area":
        direction = (1.0, 0.0)
    elif perturbation == "detuning":
        direction = (0.0, 1.0)
    elif perturbation == "random_direction":
        if seed is None:
            raise ValueError("random_direction needs a seed")
        angle = np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi)
        direction = (math.cos(angle), math.sin(angle))
    else:
        raise ValueError(f"unknown perturbation {perturbation!r}")

    eps = np.geomspace(lo, hi, samples)
    area = cp.nominal_per_pulse_area * (1.0 + eps * direction[0])
    delta_t = eps * direction[1]

    template = PulseSpec.rectangular(cp.nominal_per_pulse_area)
    omega0 = area  # duration 1
    duration = np.ones_like(eps)
    model = "constant"
    a, b = _constituents(
        template, omega0, duration, delta_t, model, config, 1, (eps,)
    )
    ga, gb = _fold_gate(phases, a, b)
    if isinstance(seq, PhaseGateSequence):
        metric = _infidelity_grid(ga, gb, seq.gate_phase)
    else:
        metric = np.abs(ga)

    usable = metric > _NOISE_FLOOR
    if usable.sum() < 2:
        raise ValueError(
            "error metric sits below the 1e-13 noise floor across the whole "
            "range; fit needs a larger eps range"
        )
    slope = np.polyfit(np.log(eps[usable]), np.log(metric[usable]), 1)[0]
    return float(slope)


def _cell_widths(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x)
    if x.size > 2:
        w[1:-1] = 0.5 * (x[2:] - x[:-2])
    w[0] = x[1] - x[0]
    w[-1] = x[-1] - x[-2]
    return w


def high_fidelity_bandwidth(result: ScanResult, threshold: float) -> float:
    """Width of the largest contiguous sub-threshold run of a 1D scan.

    Each sample owns a cell of the axis (half-distance to each neighbor, one
    grid spacing at the edges); the bandwidth is the summed cell width of the
    longest run with infidelity strictly below ``threshold``, or 0.0 if no
    sample qualifies.  A single qualifying sample therefore counts one grid
    spacing.
    """
    if len(result.axes) != 1:
        raise ValueError("bandwidth is defined for 1D scans only")
    below = result.values < threshold
    if not below.any():
        return 0.0
    widths = _cell_widths(result.axes[0].grid())
    idx = np.nonzero(below)[0]
    runs = np.split(idx, np.nonzero(np.diff(idx) > 1)[0] + 1)
    return float(max(widths[run].sum() for run in runs))


# --- CSV contract ---------------------------------------------------------

def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_scan_csv(result: ScanResult, stream: IO[str],
                   extra_header: dict | None = None) -> None:
    """Write a scan in the CSV contract: '#' metadata lines, then data rows.

    ``extra_header`` entries (e.g. a run manifest with command line and
    timestamp) are emitted before the scan metadata.
    """
    stream.write("# cpgates-scan\n")
    for key, value in (extra_header or {}).items():
        stream.write(f"# {key}: {_format_value(value)}\n")
    for key, value in result.metadata.items():
        stream.write(f"# {key}: {_format_value(value)}\n")
    for i, ax in enumerate(result.axes):
        stream.write(
            f"# axis{i}: parameter={ax.parameter} spacing={ax.spacing} "
            f"start={ax.start:.12g} stop={ax.stop:.12g} samples={ax.samples}\n"
        )
    names = ",".join(ax.parameter for ax in result.axes)
    stream.write(f"# columns: {names},infidelity\n")

    grids = [ax.grid() for ax in result.axes]
    if len(grids) == 1:
        for x, v in zip(grids[0], result.values):
            stream.write(f"{x:.11e},{v:.11e}\n")
    else:
        for i, x in enumerate(grids[0]):
            row = result.values[i]
            for y, v in zip(grids[1], row):
                stream.write(f"{x:.11e},{y:.11e},{v:.11e}\n")


def save_scan_csv(result: ScanResult, path, extra_header: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_scan_csv(result, fh, extra_header)


def read_scan_csv(path) -> ScanResult:
    """Parse a file written by :func:`write_scan_csv`."""
    metadata: dict = {}
    axes: list[SweepAxis] = []
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("axis"):
                    _, spec = body.split(":", 1)
                    fields = dict(item.split("=") for item in spec.split())
                    axes.append(
                        SweepAxis(
                            parameter=fields["parameter"],
                            start=float(fields["start"]),
                            stop=float(fields["stop"]),
                            samples=int(fields["samples"]),
                            spacing=fields["spacing"],
                        )
                    )
                elif ":" in body:
                    key, value = body.split(":", 1)
                    metadata[key.strip()] = value.strip()
                continue
            rows.append([float(part) for part in line.split(",")])
    if not axes:
        raise ValueError(f"{path} carries no axis header")
    values = np.array([row[-1] for row in rows])
    shape = tuple(ax.samples for ax in axes)
    return ScanResult(axes=tuple(axes), values=values.reshape(shape),
                      metadata=metadata)
