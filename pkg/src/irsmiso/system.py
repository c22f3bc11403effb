"""System model of the IRS-assisted MISO link.

Phase convention: a phase configuration is stored as the unit-modulus vector
``x`` with ``x[i] = exp(-1j * theta[i])``, so the reflection matrix is
``Phi = diag(conj(x))``. Every function here takes ``x`` and builds ``Phi``
implicitly; the phase angles themselves are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ContractViolation,
    DegenerateChannelError,
    EmptyIrsError,
    InvalidArgumentError,
)

UNIT_MODULUS_TOL = 1e-12


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    num_tx_antennas: int = 8
    num_irs_elements: int = 10
    tx_power_dbm: float = 5.0
    noise_power_dbm: float = -80.0
    pathloss_exponent: float = 3.0
    ref_distance_m: float = 10.0
    ref_loss_db: float = 0.0
    d_ap_irs_m: float = 50.0
    d_ap_user_m: float = 40.0
    d_irs_user_m: float = 30.0
    # derived once, in watts
    p_linear: float = field(init=False, repr=False)
    sigma2_linear: float = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.num_tx_antennas) != self.num_tx_antennas or self.num_tx_antennas < 1:
            raise InvalidArgumentError(f"num_tx_antennas must be a positive integer, got {self.num_tx_antennas}")
        if int(self.num_irs_elements) != self.num_irs_elements or self.num_irs_elements < 0:
            raise InvalidArgumentError(f"num_irs_elements must be a non-negative integer, got {self.num_irs_elements}")
        if self.pathloss_exponent < 2:
            raise InvalidArgumentError("pathloss_exponent must be >= 2")
        for name in ("ref_distance_m", "d_ap_irs_m", "d_ap_user_m", "d_irs_user_m"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be positive, got {getattr(self, name)}")
        object.__setattr__(self, "num_tx_antennas", int(self.num_tx_antennas))
        object.__setattr__(self, "num_irs_elements", int(self.num_irs_elements))
        object.__setattr__(self, "p_linear", dbm_to_watt(self.tx_power_dbm))
        object.__setattr__(self, "sigma2_linear", dbm_to_watt(self.noise_power_dbm))

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in cls.__dataclass_fields__.values() if f.init)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the AP->IRS matrix, the IRS->user and AP->user vectors."""

    ap_irs: np.ndarray  # G, shape (M, Nt)
    irs_user: np.ndarray  # h_r, shape (M,)
    ap_user: np.ndarray  # h, shape (Nt,)

    def __post_init__(self):
        G = np.asarray(self.ap_irs, dtype=np.complex128)
        hr = np.asarray(self.irs_user, dtype=np.complex128).reshape(-1)
        h = np.asarray(self.ap_user, dtype=np.complex128).reshape(-1)
        if G.ndim != 2:
            G = G.reshape(hr.size, h.size)
        if G.shape != (hr.size, h.size):
            raise InvalidArgumentError(
                f"inconsistent channel shapes: G {G.shape}, h_r {hr.shape}, h {h.shape}"
            )
        if not (np.all(np.isfinite(G)) and np.all(np.isfinite(hr)) and np.all(np.isfinite(h))):
            raise InvalidArgumentError("channel entries must be finite")
        object.__setattr__(self, "ap_irs", G)
        object.__setattr__(self, "irs_user", hr)
        object.__setattr__(self, "ap_user", h)

    @property
    def num_irs_elements(self) -> int:
        return self.irs_user.size

    @property
    def num_tx_antennas(self) -> int:
        return self.ap_user.size


@dataclass(frozen=True)
class QcqpData:
    """Quadratic form data: ``R`` of size M+1 and the pair ``(A, b)`` it contains."""

    r_matrix: np.ndarray
    a_matrix: np.ndarray
    b_vector: np.ndarray
    # optional D with A = D D^H (M x Nt); lets A x cost O(M Nt) instead of O(M^2)
    a_factor: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.a_matrix.shape[0]

    @classmethod
    def from_ab(cls, a_matrix, b_vector, a_factor=None) -> "QcqpData":
        A = np.ascontiguousarray(a_matrix, dtype=np.complex128)
        b = np.ascontiguousarray(b_vector, dtype=np.complex128).reshape(-1)
        m = b.size
        R = np.zeros((m + 1, m + 1), dtype=np.complex128)
        R[:m, :m] = A
        R[:m, m] = b
        R[m, :m] = b.conj()
        if a_factor is not None:
            a_factor = np.ascontiguousarray(a_factor, dtype=np.complex128)
        return cls(R, A, b, a_factor)

    def a_matvec(self, x) -> np.ndarray:
        if self.a_factor is not None:
            return self.a_factor @ (self.a_factor.conj().T @ x)
        return self.a_matrix @ x

    def scaled(self, factor: float) -> "QcqpData":
        """Multiply the data by ``factor``; a stored factor needs ``factor > 0``."""
        F = None
        if self.a_factor is not None:
            if not factor > 0:
                raise InvalidArgumentError("scaling a factored matrix needs a positive factor")
            F = self.a_factor * np.sqrt(factor)
        return QcqpData.from_ab(self.a_matrix * factor, self.b_vector * factor, F)

    def normalized(self) -> tuple["QcqpData", float]:
        """Return a copy scaled to unit Frobenius norm and the scale removed.

        Maximizers are unchanged; this only puts absolute stopping thresholds
        on a common footing across channel strengths.
        """
        scale = float(np.linalg.norm(self.r_matrix))
        if scale == 0.0:
            return self, 1.0
        return self.scaled(1.0 / scale), scale


def path_loss_linear(d: float, cfg: SystemConfig) -> float:
    if not d > 0:
        raise InvalidArgumentError(f"distance must be positive, got {d}")
    ref = 10.0 ** (-cfg.ref_loss_db / 10.0)
    return ref * (d / cfg.ref_distance_m) ** (-cfg.pathloss_exponent)


def _cn(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channels(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw i.i.d. Rayleigh channels whose per-entry variance is the link path loss.

    Draw order is G, h_r, h; keep it fixed, recorded seeds depend on it.
    """
    M, nt = cfg.num_irs_elements, cfg.num_tx_antennas
    G = _cn(rng, (M, nt), path_loss_linear(cfg.d_ap_irs_m, cfg))
    hr = _cn(rng, (M,), path_loss_linear(cfg.d_irs_user_m, cfg))
    h = _cn(rng, (nt,), path_loss_linear(cfg.d_ap_user_m, cfg))
    return ChannelRealization(G, hr, h)


def _as_phases(ch: ChannelRealization, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.size != ch.num_irs_elements:
        raise InvalidArgumentError(
            f"phase vector has length {x.size}, channel has M={ch.num_irs_elements}"
        )
    return x


def check_unit_modulus(v, tol: float = UNIT_MODULUS_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size and np.max(np.abs(np.abs(v) - 1.0)) > tol:
        raise ContractViolation("vector entries must have unit modulus")
    return v


def combined_channel(ch: ChannelRealization, x) -> np.ndarray:
    """Effective channel ``G^H diag(h_r) x + h`` seen by the AP beamformer."""
    x = _as_phases(ch, x)
    return ch.ap_irs.conj().T @ (ch.irs_user * x) + ch.ap_user


def spectral_efficiency(ch: ChannelRealization, phases, f, sigma2: float) -> float:
    if not sigma2 > 0:
        raise InvalidArgumentError("noise power must be positive")
    f = np.asarray(f, dtype=np.complex128).reshape(-1)
    if f.size != ch.num_tx_antennas:
        raise InvalidArgumentError(
            f"beamformer has length {f.size}, channel has Nt={ch.num_tx_antennas}"
        )
    g = combined_channel(ch, phases)
    # received amplitude (h_r^H Phi G + h^H) f equals g^H f
    gain = abs(np.vdot(g, f)) ** 2
    return float(np.log2(1.0 + gain / sigma2))


def mrt_beamformer(ch: ChannelRealization, x, p_linear: float) -> np.ndarray:
    g = combined_channel(ch, x)
    norm = np.linalg.norm(g)
    if norm == 0.0:
        raise DegenerateChannelError("combined channel is zero; MRT undefined")
    return np.sqrt(p_linear) * g / norm


def mrt_rate(ch: ChannelRealization, x, p_linear: float, sigma2: float) -> float:
    """Spectral efficiency of phases ``x`` with the MRT beamformer, in closed form."""
    g = combined_channel(ch, x)
    return float(np.log2(1.0 + p_linear * np.vdot(g, g).real / sigma2))


def build_qcqp(ch: ChannelRealization) -> QcqpData:
    M = ch.num_irs_elements
    if M == 0:
        raise EmptyIrsError("no reflecting elements; use the no-IRS baseline")
    # diag(h_r^H) G as a row scaling
    D = ch.irs_user.conj()[:, None] * ch.ap_irs
    A = D @ D.conj().T
    A = 0.5 * (A + A.conj().T)
    b = D @ ch.ap_user
    return QcqpData.from_ab(A, b, a_factor=D)


def objective_qcqp(q: QcqpData, v) -> float:
    v = check_unit_modulus(v)
    if v.size != q.r_matrix.shape[0]:
        raise InvalidArgumentError(f"expected length {q.r_matrix.shape[0]}, got {v.size}")
    val = np.vdot(v, q.r_matrix @ v)
    if abs(val.imag) >= 1e-9 * max(1.0, abs(val.real)):
        raise ContractViolation(f"quadratic form has imaginary part {val.imag}")
    return float(val.real)


def objective_p2(q: QcqpData, x) -> float:
    x = check_unit_modulus(x)
    if x.size != q.size:
        raise InvalidArgumentError(f"expected length {q.size}, got {x.size}")
    return float(-np.vdot(x, q.a_matrix @ x).real - 2.0 * np.vdot(x, q.b_vector).real)


# -- plain-text channel fixtures ---------------------------------------------


def format_channel(ch: ChannelRealization) -> str:
    M, nt = ch.ap_irs.shape
    lines = [f"G {M} {nt}", f"hr {M}", f"h {nt}"]
    for z in np.concatenate([ch.ap_irs.reshape(-1), ch.irs_user, ch.ap_user]):
        lines.append(f"{float(z.real)!r} {float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def parse_channel(text: str) -> ChannelRealization:
    lines = [ln.split() for ln in text.strip().splitlines()]
    try:
        tag_g, M, nt = lines[0][0], int(lines[0][1]), int(lines[0][2])
        tag_hr, m2 = lines[1][0], int(lines[1][1])
        tag_h, nt2 = lines[2][0], int(lines[2][1])
    except (IndexError, ValueError) as exc:
        raise InvalidArgumentError("malformed channel header") from exc
    if (tag_g, tag_hr, tag_h) != ("G", "hr", "h") or m2 != M or nt2 != nt:
        raise InvalidArgumentError("inconsistent channel header")
    body = lines[3:]
    if len(body) != M * nt + M + nt:
        raise InvalidArgumentError(f"expected {M * nt + M + nt} entries, found {len(body)}")
    vals = np.array([float(re) + 1j * float(im) for re, im in body], dtype=np.complex128)
    return ChannelRealization(
        vals[: M * nt].reshape(M, nt), vals[M * nt : M * nt + M], vals[M * nt + M :]
    )


def save_channel(ch: ChannelRealization, path) -> None:
    Path(path).write_text(format_channel(ch))


def load_channel(path) -> ChannelRealization:
    return parse_channel(Path(path).read_text())
