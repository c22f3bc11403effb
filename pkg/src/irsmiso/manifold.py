"""Riemannian conjugate gradient on the complex circle manifold.

Minimizes ``f(x) = -x^H A x - 2 Re(x^H b)`` subject to ``|x_i| = 1``. The
metric is ``<u, v> = Re(u^H v)``; with it the Euclidean gradient is
``-2 (A x + b)`` and ``df = Re(grad^H dx)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _jit
from ._jit import njit
from .errors import ContractViolation, InvalidArgumentError
from .fixed_point import _matvec, unt
from .system import QcqpData, check_unit_modulus

ARMIJO_ALPHA0 = 1.0
ARMIJO_SHRINK = 0.5
ARMIJO_C = 1e-4
ARMIJO_MAX_BACKTRACKS = 50
# next initial step: minimizer of the quadratic fitted to the last accepted
# step, capped at STEP_GROWTH times that step
STEP_GROWTH = 2.0
STEP_MAX = 1e8


@dataclass(frozen=True)
class RcgResult:
    x_final: np.ndarray
    iterations: int
    objective_history: np.ndarray
    grad_norm_final: float
    converged: bool
    stalled: bool = False


def _vec(z, n=None) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    if n is not None and z.size != n:
        raise InvalidArgumentError(f"dimension mismatch: {z.size} != {n}")
    return z


def tangent_project(x, z) -> np.ndarray:
    """Orthogonal projection of ``z`` onto the tangent space at ``x``."""
    x = _vec(x)
    z = _vec(z, x.size)
    return z - np.real(z * np.conj(x)) * x


def euclidean_grad(q: QcqpData, x) -> np.ndarray:
    x = _vec(x, q.size)
    return -2.0 * (q.a_matrix @ x + q.b_vector)


def riemannian_grad(q: QcqpData, x) -> np.ndarray:
    return tangent_project(x, euclidean_grad(q, x))


def transport(eta, x_next) -> np.ndarray:
    """Move a tangent vector to the tangent space at ``x_next`` by projection."""
    return tangent_project(x_next, eta)


def retract(x, eta, alpha: float) -> np.ndarray:
    """``unt(x + alpha * eta)``; an entry that vanishes keeps the phase of ``x``."""
    if alpha < 0:
        raise InvalidArgumentError("step size must be non-negative")
    x = _vec(x)
    if alpha == 0:
        return x.copy()
    return unt(x + alpha * _vec(eta, x.size), fallback=x)


def _objective(q: QcqpData, x) -> float:
    return _f_ax(q, x)[0]


def _f_ax(q: QcqpData, x):
    ax = q.a_matvec(x)
    return float(-np.vdot(x, ax).real - 2.0 * np.vdot(x, q.b_vector).real), ax


def _rgrad_from_ax(q: QcqpData, x, ax):
    return tangent_project(x, -2.0 * (ax + q.b_vector))


def _decrease(q, d, ax, ax_new):
    # f(x + d) - f(x) from the step itself; differencing two f values loses
    # every significant digit once the decrease nears rounding level
    return float(-np.vdot(d, ax + ax_new + 2.0 * q.b_vector).real)


@njit
def _next_step(alpha, dec, slope, growth, alpha_max):
    r = dec / (alpha * slope) if slope < 0 else 1.0
    step = growth * alpha
    if r < 1.0:
        step = min(step, alpha / (2.0 * (1.0 - r)))
    return min(alpha_max, step)


def _armijo(q, x, eta, fx, slope, alpha0=ARMIJO_ALPHA0, ax=None):
    """Backtracking search; returns (alpha, x_new, f_new, A x_new), alpha 0 on stall."""
    if ax is None:
        ax = q.a_matvec(x)
    alpha = alpha0
    for _ in range(ARMIJO_MAX_BACKTRACKS + 1):
        xn = retract(x, eta, alpha)
        fn, ax_new = _f_ax(q, xn)
        if _decrease(q, xn - x, ax, ax_new) <= ARMIJO_C * alpha * slope:
            return alpha, xn, fn, ax_new
        alpha *= ARMIJO_SHRINK
    return 0.0, x, fx, ax


def armijo_step(q: QcqpData, x, eta, alpha_init: float = ARMIJO_ALPHA0) -> float:
    """Largest ``alpha_init * 0.5**m`` meeting the sufficient-decrease test.

    The test is ``f(retract(x, eta, a)) <= f(x) + 1e-4 * a * <grad, eta>``.
    Returns 0.0 when 50 backtracks are not enough (a stall).
    """
    x = check_unit_modulus(_vec(x, q.size))
    eta = _vec(eta, x.size)
    grad = riemannian_grad(q, x)
    slope = float(np.vdot(grad, eta).real)
    if slope > 0:
        raise ContractViolation("search direction is not a descent direction")
    return _armijo(q, x, eta, _objective(q, x), slope, alpha_init)[0]


# -- solver loops ------------------------------------------------------------


def _rcg_numpy(q: QcqpData, x0, eps, max_iter):
    x = x0.copy()
    fx, ax = _f_ax(q, x)
    g = _rgrad_from_ax(q, x, ax)
    eta = -g
    hist = [fx]
    gnorm = float(np.linalg.norm(g))
    it = 0
    converged = gnorm <= eps
    stalled = False
    alpha_start = ARMIJO_ALPHA0
    while not converged and it < max_iter:
        slope = float(np.vdot(g, eta).real)
        if slope >= 0:
            eta = -g
            slope = -gnorm * gnorm
        alpha, x_new, f_new, ax_new = _armijo(q, x, eta, fx, slope, alpha_start, ax)
        if alpha == 0.0:
            stalled = True
            break
        dec = _decrease(q, x_new - x, ax, ax_new)
        alpha_start = _next_step(alpha, dec, slope, STEP_GROWTH, STEP_MAX)
        ax = ax_new
        g_new = _rgrad_from_ax(q, x_new, ax)
        eta_tr = transport(eta, x_new)
        g_tr = transport(g, x_new)
        denom = float(np.vdot(g, g).real)
        beta = float(np.vdot(g_new, g_new - g_tr).real) / denom if denom > 0 else 0.0
        beta = max(beta, 0.0)
        eta = -g_new + beta * eta_tr
        x, fx, g = x_new, f_new, g_new
        gnorm = float(np.linalg.norm(g))
        hist.append(fx)
        it += 1
        converged = gnorm <= eps
    return x, it, np.array(hist), gnorm, converged, stalled


@njit
def _nb_amul(A, F, use_factor, x):
    n = x.size
    out = np.zeros(n, dtype=np.complex128)
    if use_factor:
        k = F.shape[1]
        y = np.zeros(k, dtype=np.complex128)
        for j in range(k):
            acc = 0j
            for i in range(n):
                acc += np.conj(F[i, j]) * x[i]
            y[j] = acc
        for i in range(n):
            acc = 0j
            for j in range(k):
                acc += F[i, j] * y[j]
            out[i] = acc
        return out
    return _matvec(A, x)


@njit
def _nb_f(ax, b, x):
    acc = 0.0
    for i in range(x.size):
        z = np.conj(x[i])
        acc -= (z * ax[i]).real + 2.0 * (z * b[i]).real
    return acc


@njit
def _nb_rgrad(ax, b, x):
    g = np.empty(x.size, dtype=np.complex128)
    for i in range(x.size):
        e = -2.0 * (ax[i] + b[i])
        g[i] = e - (e * np.conj(x[i])).real * x[i]
    return g


@njit
def _nb_project(x, z):
    out = np.empty(x.size, dtype=np.complex128)
    for i in range(x.size):
        out[i] = z[i] - (z[i] * np.conj(x[i])).real * x[i]
    return out


@njit
def _nb_retract(x, eta, alpha):
    out = np.empty(x.size, dtype=np.complex128)
    for i in range(x.size):
        y = x[i] + alpha * eta[i]
        mag = abs(y)
        out[i] = y / mag if mag > 1e-14 else x[i]
    return out


@njit
def _nb_dot(u, v):
    acc = 0.0
    for i in range(u.size):
        acc += (np.conj(u[i]) * v[i]).real
    return acc


@njit
def _rcg_numba(A, F, use_factor, b, x0, eps, max_iter, alpha0, shrink, c, max_bt, growth, alpha_max):
    x = x0.copy()
    ax = _nb_amul(A, F, use_factor, x)
    fx = _nb_f(ax, b, x)
    g = _nb_rgrad(ax, b, x)
    eta = -g
    hist = np.empty(max_iter + 1)
    hist[0] = fx
    gnorm = np.sqrt(_nb_dot(g, g))
    it = 0
    converged = gnorm <= eps
    stalled = False
    alpha_start = alpha0
    while not converged and it < max_iter:
        slope = _nb_dot(g, eta)
        if slope >= 0:
            eta = -g
            slope = -gnorm * gnorm
        alpha = alpha_start
        accepted = False
        x_new = x
        f_new = fx
        ax_new = ax
        for _ in range(max_bt + 1):
            x_new = _nb_retract(x, eta, alpha)
            ax_new = _nb_amul(A, F, use_factor, x_new)
            f_new = _nb_f(ax_new, b, x_new)
            dec = 0.0
            for i in range(x.size):
                dec -= (np.conj(x_new[i] - x[i]) * (ax[i] + ax_new[i] + 2.0 * b[i])).real
            if dec <= c * alpha * slope:
                accepted = True
                break
            alpha *= shrink
        if not accepted:
            stalled = True
            break
        alpha_start = _next_step(alpha, dec, slope, growth, alpha_max)
        ax = ax_new
        g_new = _nb_rgrad(ax, b, x_new)
        eta_tr = _nb_project(x_new, eta)
        g_tr = _nb_project(x_new, g)
        denom = _nb_dot(g, g)
        beta = _nb_dot(g_new, g_new - g_tr) / denom if denom > 0 else 0.0
        if beta < 0:
            beta = 0.0
        eta = -g_new + beta * eta_tr
        x = x_new
        fx = f_new
        g = g_new
        gnorm = np.sqrt(_nb_dot(g, g))
        it += 1
        hist[it] = fx
        converged = gnorm <= eps
    return x, it, hist[: it + 1].copy(), gnorm, converged, stalled


def rcg_solve(
    q: QcqpData, x0, eps: float = 1e-6, max_iter: int = 1000, backend=None
) -> RcgResult:
    """Polak-Ribiere conjugate gradient with Armijo backtracking on the circle manifold.

    ``beta`` is clamped at zero, and the direction falls back to the negative
    gradient whenever it stops being a descent direction. The first line
    search starts at step 1. Later ones start at the minimizer of the quadratic
    through the previous step's f(0), slope and f(alpha), capped at twice the
    previous accepted step.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    x0 = check_unit_modulus(_vec(x0, q.size)).copy()
    backend = backend or _jit.backend_name()
    if backend == "numba":
        use_factor = q.a_factor is not None
        F = q.a_factor if use_factor else np.zeros((q.size, 0), dtype=np.complex128)
        out = _rcg_numba(
            np.ascontiguousarray(q.a_matrix),
            np.ascontiguousarray(F),
            use_factor,
            np.ascontiguousarray(q.b_vector),
            x0,
            float(eps),
            int(max_iter),
            ARMIJO_ALPHA0,
            ARMIJO_SHRINK,
            ARMIJO_C,
            ARMIJO_MAX_BACKTRACKS,
            STEP_GROWTH,
            STEP_MAX,
        )
    else:
        out = _rcg_numpy(q, x0, float(eps), int(max_iter))
    x, it, hist, gnorm, converged, stalled = out
    return RcgResult(x, int(it), np.asarray(hist, dtype=float), float(gnorm), bool(converged), bool(stalled))
