"""Reference points: exhaustive phase grid, random phases, and MRT without an IRS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _jit
from ._jit import njit
from .errors import DegenerateChannelError, InvalidArgumentError, OracleSizeError
from .system import ChannelRealization, QcqpData

GRID_GUARD = 10**7
_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleResult:
    best_x: np.ndarray
    best_objective: float
    grid_points_per_phase: int
    evaluations: int
    best_index: int


def grid_phases(k_points: int) -> np.ndarray:
    """The K candidate entries ``exp(-2j*pi*m/K)``, m = 0..K-1."""
    return np.exp(-2j * np.pi * np.arange(k_points) / k_points)


@njit
def _grid_numba(A, b, alphabet):
    M = b.size
    K = alphabet.size
    total = K**M
    digits = np.zeros(M, dtype=np.int64)
    x = np.empty(M, dtype=np.complex128)
    for i in range(M):
        x[i] = alphabet[0]
    best = np.inf
    best_idx = 0
    for idx in range(total):
        f = 0.0
        for i in range(M):
            xi = np.conj(x[i])
            acc = 0j
            for j in range(M):
                acc += A[i, j] * x[j]
            f -= (xi * acc).real + 2.0 * (xi * b[i]).real
        if f < best:
            best = f
            best_idx = idx
        # odometer, last element fastest
        pos = M - 1
        while pos >= 0:
            digits[pos] += 1
            if digits[pos] < K:
                x[pos] = alphabet[digits[pos]]
                break
            digits[pos] = 0
            x[pos] = alphabet[0]
            pos -= 1
    return best_idx, best


def _grid_numpy(A, b, alphabet):
    M, K = b.size, alphabet.size
    total = K**M
    weights = K ** np.arange(M - 1, -1, -1, dtype=np.int64)
    best, best_idx = np.inf, 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        digits = (idx[:, None] // weights[None, :]) % K
        X = alphabet[digits]
        f = -np.einsum("ni,ni->n", X.conj(), X @ A.T).real - 2.0 * (X.conj() @ b).real
        k = int(np.argmin(f))
        # strict comparison keeps the earliest chunk on ties
        if f[k] < best:
            best, best_idx = float(f[k]), int(idx[k])
    return best_idx, best


def index_to_phases(index: int, m: int, k_points: int) -> np.ndarray:
    digits = np.zeros(m, dtype=np.int64)
    for pos in range(m - 1, -1, -1):
        index, digits[pos] = divmod(index, k_points)
    return grid_phases(k_points)[digits]


def grid_oracle(q: QcqpData, k_points: int, backend=None) -> OracleResult:
    """Minimize the P2 objective over every phase vector on a K-point grid.

    Ties go to the lexicographically smallest grid index (first element most
    significant).
    """
    if k_points < 2:
        raise InvalidArgumentError("k_points must be >= 2")
    M = q.size
    total = k_points**M
    if total > GRID_GUARD:
        raise OracleSizeError(f"{k_points}^{M} = {total} candidates exceeds guard {GRID_GUARD}")
    A = np.ascontiguousarray(q.a_matrix, dtype=np.complex128)
    b = np.ascontiguousarray(q.b_vector, dtype=np.complex128)
    alphabet = grid_phases(k_points)
    backend = backend or _jit.backend_name()
    if backend == "numba":
        idx, best = _grid_numba(A, b, alphabet)
    else:
        idx, best = _grid_numpy(A, b, alphabet)
    return OracleResult(index_to_phases(int(idx), M, k_points), float(best), k_points, total, int(idx))


def random_phases(m: int, rng: np.random.Generator) -> np.ndarray:
    if m < 1:
        raise InvalidArgumentError("need at least one element")
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=m))


def no_irs_mrt_rate(ch: ChannelRealization, p_linear: float, sigma2: float) -> float:
    """Rate of MRT aligned with the direct channel alone."""
    gain = float(np.vdot(ch.ap_user, ch.ap_user).real)
    if gain == 0.0:
        raise DegenerateChannelError("direct channel is zero")
    return float(np.log2(1.0 + p_linear * gain / sigma2))
