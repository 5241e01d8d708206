"""Vectorized adaptive Runge-Kutta stepping for batches of independent ODEs.

Parameter scans need tens of thousands of small independent integrations, so
instead of one Python-level solver call per grid point this module advances a
whole batch in lockstep with numpy, each system carrying its own time, step
size and accept/reject history.  A system's step sequence depends only on its
own state, which keeps every result bitwise identical no matter how a grid is
split into batches or spread over workers.

The stepper is the embedded Dormand-Prince 5(4) pair with a standard
proportional step controller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["BatchResult", "solve_batch"]

# Dormand-Prince 5(4) tableau.
_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0)
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
# Difference between the 5th- and 4th-order weights (error estimator).
_E1, _E3, _E4, _E5, _E6, _E7 = (
    _B1 - 5179.0 / 57600.0,
    _B3 - 7571.0 / 16695.0,
    _B4 - 393.0 / 640.0,
    _B5 + 92097.0 / 339200.0,
    _B6 - 187.0 / 2100.0,
    -1.0 / 40.0,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@dataclass
class BatchResult:
    """Final states plus per-system bookkeeping of a batch integration."""

    y: np.ndarray        # (m, d) complex, final states
    success: np.ndarray  # (m,) bool
    n_steps: np.ndarray  # (m,) int, accepted + rejected step attempts


def solve_batch(
    rhs: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    t_start: np.ndarray,
    t_end: np.ndarray,
    y0: np.ndarray,
    rtol: float,
    atol: float,
    max_steps: int,
) -> BatchResult:
    """Integrate dy/dt = rhs(t, y, idx) from t_start to t_end per system.

    Parameters
    ----------
    rhs : callable
        Vectorized right-hand side.  Called as ``rhs(t, y, idx)`` where
        ``t`` has shape (k,), ``y`` has shape (k, d) and ``idx`` holds the
        original indices of the k currently active systems, so per-system
        parameters can be gathered by the callee.
    t_start, t_end : (m,) arrays
        Integration window per system.  Systems with an empty window keep
        their initial state.
    y0 : (m, d) complex array
    rtol, atol : float
        Local error control, scipy-style scale atol + rtol * |y|.
    max_steps : int
        Attempt budget per system; exceeding it marks the system failed.
    """
    t0 = np.atleast_1d(np.asarray(t_start, dtype=float))
    t1 = np.atleast_1d(np.asarray(t_end, dtype=float))
    y = np.array(y0, dtype=np.complex128, copy=True)
    m = y.shape[0]
    span = t1 - t0

    t = t0.copy()
    success = np.ones(m, dtype=bool)
    n_steps = np.zeros(m, dtype=np.int64)
    active = span > 0.0

    k1 = np.zeros_like(y)
    h = np.zeros(m, dtype=float)
    if active.any():
        idx = np.nonzero(active)[0]
        f0 = rhs(t[idx], y[idx], idx)
        k1[idx] = f0
        # crude first guess; the controller corrects it within a few steps
        scale = atol + rtol * np.abs(y[idx])
        d0 = np.sqrt(np.mean((np.abs(y[idx]) / scale) ** 2, axis=1))
        d1 = np.sqrt(np.mean((np.abs(f0) / scale) ** 2, axis=1))
        with np.errstate(over="ignore", divide="ignore"):
            ratio = 0.01 * d0 / np.maximum(d1, 1e-300)
        h0 = np.where(d1 > 1e-300, ratio, span[idx])
        h[idx] = np.minimum(np.maximum(h0, 1e-6 * span[idx]), span[idx])

    # steps never exceed a fixed fraction of the window, so a localized
    # pulse cannot slip between the stage points of one long quiet step
    h_cap = span / 16.0

    while active.any():
        idx = np.nonzero(active)[0]
        ta, ya, ha, k1a = t[idx], y[idx], np.minimum(h[idx], h_cap[idx]), k1[idx]
        remaining = t1[idx] - ta
        hs = np.minimum(ha, remaining)
        final_step = hs >= remaining
        hc = hs[:, None]

        k2 = rhs(ta + _C[0] * hs, ya + hc * (_A21 * k1a), idx)
        k3 = rhs(ta + _C[1] * hs, ya + hc * (_A31 * k1a + _A32 * k2), idx)
        k4 = rhs(ta + _C[2] * hs, ya + hc * (_A41 * k1a + _A42 * k2 + _A43 * k3), idx)
        k5 = rhs(
            ta + _C[3] * hs,
            ya + hc * (_A51 * k1a + _A52 * k2 + _A53 * k3 + _A54 * k4),
            idx,
        )
        k6 = rhs(
            ta + _C[4] * hs,
            ya + hc * (_A61 * k1a + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
            idx,
        )
        y_new = ya + hc * (_B1 * k1a + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = rhs(ta + hs, y_new, idx)

        err = hc * (
            _E1 * k1a + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7
        )
        scale = atol + rtol * np.maximum(np.abs(ya), np.abs(y_new))
        err_norm = np.sqrt(np.mean((np.abs(err) / scale) ** 2, axis=1))

        accept = err_norm <= 1.0  # NaN compares False, rejecting bad steps
        with np.errstate(divide="ignore"):
            factor = _SAFETY * err_norm ** -0.2
        factor = np.where(err_norm == 0.0, _MAX_FACTOR, factor)
        factor = np.where(np.isnan(factor), _MIN_FACTOR, factor)
        factor = np.clip(factor, _MIN_FACTOR, _MAX_FACTOR)
        # never grow the step right after a rejection
        factor = np.where(accept, factor, np.minimum(factor, 1.0))
        h[idx] = hs * factor

        if accept.any():
            acc = idx[accept]
            t[acc] = np.where(final_step[accept], t1[acc], ta[accept] + hs[accept])
            y[acc] = y_new[accept]
            k1[acc] = k7[accept]

        n_steps[idx] += 1
        exhausted = n_steps[idx] >= max_steps
        stalled = hs <= 1e-14 * span[idx]
        failed = (exhausted | stalled) & (t[idx] < t1[idx])
        if failed.any():
            success[idx[failed]] = False
        active[idx] = ~failed & (t[idx] < t1[idx])

    return BatchResult(y=y, success=success, n_steps=n_steps)
