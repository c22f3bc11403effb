"""Starting point from the norm-relaxed problem: the phases of R's top eigenvector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _jit
from ._jit import njit
from .fixed_point import _matvec, unt
from .system import QcqpData

START_PERTURBATION = 1e-3


@dataclass(frozen=True)
class EigenResult:
    eigenvector: np.ndarray
    eigenvalue: float
    residual: float
    iterations: int
    converged: bool


def gershgorin_shift(R) -> float:
    """Smallest non-negative ``s`` that Gershgorin certifies makes ``R + s I`` PSD."""
    R = np.asarray(R)
    absr = np.abs(R)
    radius = absr.sum(axis=1) - np.abs(np.diag(R))
    lower = np.min(np.real(np.diag(R)) - radius)
    return float(max(0.0, -lower))


@njit
def _power_numba(R, shift, u0, tol, max_iter):
    n = R.shape[0]
    u = u0.copy()
    lam = 0.0
    res = np.inf
    it = 0
    while True:
        w = _matvec(R, u)
        lam = 0.0
        for i in range(n):
            lam += (np.conj(u[i]) * w[i]).real
        res = 0.0
        for i in range(n):
            d = w[i] - lam * u[i]
            res += d.real * d.real + d.imag * d.imag
        res = np.sqrt(res)
        if res <= tol * (abs(lam) + 1.0) or it >= max_iter:
            break
        nrm = 0.0
        for i in range(n):
            w[i] += shift * u[i]
            nrm += w[i].real * w[i].real + w[i].imag * w[i].imag
        nrm = np.sqrt(nrm)
        for i in range(n):
            u[i] = w[i] / nrm
        it += 1
    return u, lam, res, it


def _power_numpy(R, shift, u0, tol, max_iter):
    u = u0.copy()
    it = 0
    while True:
        w = R @ u
        lam = float(np.vdot(u, w).real)
        res = float(np.linalg.norm(w - lam * u))
        if res <= tol * (abs(lam) + 1.0) or it >= max_iter:
            break
        w = w + shift * u
        u = w / np.linalg.norm(w)
        it += 1
    return u, lam, res, it


def largest_eigenvector(
    q: QcqpData, tol: float = 1e-10, max_iter: int = 5000, backend=None
) -> EigenResult:
    """Dominant eigenpair of the (possibly indefinite) Hermitian ``R``.

    Power iteration runs on ``R + s I`` with a Gershgorin shift ``s`` so that
    the top eigenvalue of ``R`` is also the dominant one of the shifted matrix.
    Starts from the normalized all-ones vector; if that has not converged
    halfway through the budget, restarts once from a perturbed start.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    backend = backend or _jit.backend_name()
    kernel = _power_numba if backend == "numba" else _power_numpy
    R = np.ascontiguousarray(q.r_matrix, dtype=np.complex128)
    n = R.shape[0]
    shift = gershgorin_shift(R)
    u0 = np.ones(n, dtype=np.complex128) / np.sqrt(n)
    half = max(1, max_iter // 2)
    u, lam, res, it = kernel(R, shift, u0, float(tol), int(half))
    total = it
    if res > tol * (abs(lam) + 1.0):
        u1 = u0.copy()
        u1[0] += START_PERTURBATION
        u1 /= np.linalg.norm(u1)
        u, lam, res, it = kernel(R, shift, u1, float(tol), int(max_iter - half))
        total += it
    return EigenResult(u, float(lam), float(res), int(total), bool(res <= tol * (abs(lam) + 1.0)))


def initial_point(q: QcqpData, eig: EigenResult | None = None) -> np.ndarray:
    """Phase-extracted top eigenvector, a unit-modulus vector of length M+1.

    Its first M entries are the starting phases for the manifold solver.
    """
    if eig is None:
        eig = largest_eigenvector(q)
    # scaling by sqrt(M+1) does not change the phases
    return unt(eig.eigenvector)
