"""Fixed-point iteration ``v <- unt(R v)`` for the unit-modulus QCQP."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _jit
from ._jit import njit
from .errors import DegenerateChannelError
from .system import QcqpData, check_unit_modulus

ZERO_TOL = 1e-14


def unt(a, fallback=None) -> np.ndarray:
    """Entrywise ``a_i / |a_i|``.

    Entries with ``|a_i| <= 1e-14`` take the phase of ``fallback`` (the
    previous iterate) or 1 when no fallback is given. An all-zero input with
    no fallback is rejected.
    """
    a = np.asarray(a, dtype=np.complex128).reshape(-1)
    mag = np.abs(a)
    small = mag <= ZERO_TOL
    if fallback is None:
        if a.size and np.all(small):
            raise DegenerateChannelError("unt of an all-zero vector is undefined")
        fill = np.ones(a.size, dtype=np.complex128)
    else:
        fill = np.asarray(fallback, dtype=np.complex128).reshape(-1)
    out = fill.copy()
    big = ~small
    out[big] = a[big] / mag[big]
    return out


def fp_step(q: QcqpData, v) -> np.ndarray:
    v = check_unit_modulus(v)
    return unt(q.r_matrix @ v, fallback=v)


@dataclass(frozen=True)
class FixedPointResult:
    v_final: np.ndarray
    iterations: int
    surrogate_history: np.ndarray
    converged: bool
    # QCQP objective v^H R v at v_final, recorded next to the stopping surrogate
    objective: float


# -- kernels -----------------------------------------------------------------


@njit
def _matvec(R, v):
    n = R.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        acc = 0j
        for j in range(n):
            acc += R[i, j] * v[j]
        out[i] = acc
    return out


@njit
def _fp_iterate_numba(R, v0, eps, max_iter):
    n = R.shape[0]
    v = v0.copy()
    hist = np.empty(max_iter + 1)
    rv = _matvec(R, v)
    s = 0.0
    for i in range(n):
        s += abs(rv[i])
    hist[0] = s
    it = 0
    converged = False
    while it < max_iter:
        for i in range(n):
            mag = abs(rv[i])
            if mag > 1e-14:
                v[i] = rv[i] / mag
        rv = _matvec(R, v)
        s_new = 0.0
        for i in range(n):
            s_new += abs(rv[i])
        it += 1
        hist[it] = s_new
        if s_new - s <= eps:
            converged = True
            break
        s = s_new
    return v, it, hist[: it + 1].copy(), converged


def _fp_iterate_numpy(R, v0, eps, max_iter):
    v = v0.copy()
    hist = [0.0]
    rv = R @ v
    s = np.abs(rv).sum()
    hist[0] = s
    it = 0
    converged = False
    while it < max_iter:
        v = unt(rv, fallback=v)
        rv = R @ v
        s_new = np.abs(rv).sum()
        it += 1
        hist.append(s_new)
        if s_new - s <= eps:
            converged = True
            break
        s = s_new
    return v, it, np.array(hist), converged


def _fp_iterate(R, v0, eps, max_iter, backend=None):
    backend = backend or _jit.backend_name()
    R = np.ascontiguousarray(R, dtype=np.complex128)
    v0 = np.ascontiguousarray(v0, dtype=np.complex128)
    if backend == "numba":
        return _fp_iterate_numba(R, v0, float(eps), int(max_iter))
    return _fp_iterate_numpy(R, v0, float(eps), int(max_iter))


def solve_fixed_point(
    q: QcqpData, v0, eps: float = 1e-6, max_iter: int = 1000, backend=None
) -> FixedPointResult:
    """Iterate ``v <- unt(R v)`` until the L1 surrogate ``||R v||_1`` stalls.

    Stops once the surrogate increases by at most ``eps`` in one step. The
    returned vector is rotated so that its last entry is exactly 1.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    v0 = check_unit_modulus(v0)
    v, it, hist, converged = _fp_iterate(q.r_matrix, v0, eps, max_iter, backend)
    last = v[-1]
    v = v * (np.conj(last) / abs(last))
    v[-1] = 1.0
    obj = float(np.vdot(v, q.r_matrix @ v).real)
    return FixedPointResult(v, int(it), np.asarray(hist, dtype=float), bool(converged), obj)


def extract_phase_config(res: FixedPointResult) -> np.ndarray:
    """First M entries of the normalized limit point, i.e. the phase vector ``x``."""
    return res.v_final[:-1].copy()


def limit_point_residual(q: QcqpData, v) -> float:
    """Relative violation of ``R v = Abs(R v) o v`` at a candidate limit point."""
    rv = q.r_matrix @ np.asarray(v, dtype=np.complex128)
    return float(np.linalg.norm(rv - np.abs(rv) * v) / np.linalg.norm(rv))
