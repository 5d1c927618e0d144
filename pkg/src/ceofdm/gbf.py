"""Fourier coefficients of the periodic phase factor.

exp(j phi(t)) is T-periodic, so s(t) = rect(t/T)/sqrt(T) * sum_m c_m
exp(j 2 pi m t / T) with

    c_m = (1/2pi) int_0^{2pi} exp(j 2 pi h sum_l gamma_l cos(l theta + phi_l))
          exp(-j m theta) d theta.

For L = 1 these reduce to c_m = j^m exp(j m phi_1) J_m(2 pi h gamma_1) with
J_m the ordinary Bessel function (Jacobi-Anger); for L > 1 they are
generalized multi-tone analogues.  The engine computes them by FFT of the
uniformly sampled phase factor, which aliases coefficients at |m| > N_fft - M;
the FFT size is padded to at least 4 (2M + 1) so the aliased tail sits below
the truncation residual being measured.

Truncation order schedule: start at M0 = ceil(e pi h L (L+1) / 2) + 8 (a
safety factor of e/2 over the peak harmonic extent 2 pi h L(L+1)/2 of the
phase derivative), then double until the Parseval residual 1 - sum |c_m|^2
drops below tol, failing at M > 2^20.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .waveform import WaveformSpec, spec_digest

M_CAP = 1 << 20


class TruncationFailure(RuntimeError):
    """Coefficient truncation could not meet tolerance within the M cap."""


@dataclass(frozen=True)
class GbfCoefficients:
    """Truncated coefficient block c_{-M}..c_M with its Parseval residual."""

    M: int
    c: np.ndarray
    residual: float
    spec_hash: str

    def __post_init__(self):
        c = np.array(self.c, dtype=complex)
        if c.shape != (2 * self.M + 1,):
            raise ValueError("coefficient array must have length 2M + 1")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def m_index(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def coefficient(self, m: int) -> complex:
        if abs(m) > self.M:
            raise IndexError(f"m = {m} outside -{self.M}..{self.M}")
        return complex(self.c[self.M + m])


def _initial_order(spec: WaveformSpec) -> int:
    L = spec.L
    return math.ceil(math.e * math.pi * spec.h * L * (L + 1) / 2.0) + 8


def _coefficients_at_order(spec: WaveformSpec, M: int) -> tuple[np.ndarray, float]:
    nfft = 1
    while nfft < 4 * (2 * M + 1):
        nfft *= 2
    theta = 2.0 * np.pi * np.arange(nfft) / nfft
    ell = np.arange(1, spec.L + 1, dtype=float)
    ph = 2.0 * np.pi * spec.h * np.sum(
        spec.code.gamma[:, None] * np.cos(np.outer(ell, theta) + spec.code.phi[:, None]),
        axis=0)
    g = np.exp(1j * ph)
    G = np.fft.fft(g) / nfft
    m = np.arange(-M, M + 1)
    c = G[m % nfft]
    residual = float(1.0 - np.sum(np.abs(c) ** 2))
    return c, residual


def compute_coefficients(spec: WaveformSpec, tol: float = 1e-12) -> GbfCoefficients:
    """Compute the coefficient block at the smallest scheduled order meeting tol.

    tol must lie in (0, 1e-3] and bounds two things at the returned order:
    the Parseval residual 1 - sum_{|m|<=M} |c_m|^2, and the magnitude of the
    outermost coefficients c_{+-M}.  The energy residual alone saturates at
    the rounding floor of a 2M-term sum (~1e-15) while edge coefficients of
    ~1e-8 can still spoil pointwise resynthesis, so both are required; with
    the super-exponential decay beyond the initial order this keeps the
    resynthesized phase factor within about 10 * tol everywhere.  Output is
    deterministic: fixed FFT sizes, fixed schedule.
    """
    if not (0.0 < tol <= 1e-3):
        raise ValueError(f"tol must be in (0, 1e-3], got {tol}")
    M = _initial_order(spec)
    while True:
        if M > M_CAP:
            raise TruncationFailure(
                f"truncation order {M} exceeds cap {M_CAP} before reaching tol {tol}")
        c, residual = _coefficients_at_order(spec, M)
        edge = max(abs(c[0]), abs(c[-1]))
        if residual < tol and edge <= tol:
            return GbfCoefficients(M=M, c=c, residual=residual,
                                   spec_hash=spec_digest(spec))
        M *= 2


def truncation_order(spec: WaveformSpec, tol: float = 1e-12) -> int:
    """Smallest scheduled M whose Parseval residual is below tol."""
    return compute_coefficients(spec, tol).M


def resynthesize(coeffs: GbfCoefficients, T: float, t) -> np.ndarray:
    """Evaluate sum_m c_m exp(j 2 pi m t / T) on the given times."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros(len(t), dtype=complex)
    m = coeffs.m_index
    # chunk over m to bound the (m, t) outer product
    step = max(1, (1 << 20) // max(len(t), 1))
    for i in range(0, len(m), step):
        blk = m[i:i + step]
        out += coeffs.c[i:i + step] @ np.exp(2j * np.pi * np.outer(blk, t) / T)
    return out


def write_coefficients_csv(coeffs: GbfCoefficients, path) -> None:
    """Dump m, Re c_m, Im c_m, |c_m|^2 rows at full precision."""
    with open(path, "w") as fh:
        fh.write("m,re,im,abs2\n")
        for m, cm in zip(coeffs.m_index, coeffs.c):
            fh.write(f"{m},{cm.real:.17g},{cm.imag:.17g},{abs(cm) ** 2:.17g}\n")


def ordinary_bessel(m: int, z: float) -> float:
    """Ordinary Bessel function J_m(z) for integer m and real |z| < 700.

    Ascending power series for |z| <= 12, backward (Miller) recurrence with
    the J_0 + 2 sum J_2k = 1 normalization otherwise.  Accurate to about
    1e-12 absolute; independent of the FFT coefficient path.
    """
    m = int(m)
    z = float(z)
    if abs(z) >= 700.0:
        raise ValueError(f"|z| must be < 700, got {z}")
    sign = 1.0
    if m < 0:
        m = -m
        if m % 2:
            sign = -sign
    if z < 0:
        z = -z
        if m % 2:
            sign = -sign
    if z == 0.0:
        return sign if m == 0 else 0.0
    if z <= 12.0:
        return sign * _bessel_series(m, z)
    return sign * _bessel_miller(m, z)


def _bessel_series(m: int, z: float) -> float:
    # J_m(z) = sum_k (-1)^k (z/2)^{m+2k} / (k! (m+k)!)
    half = z / 2.0
    term = half ** m / math.factorial(m)
    total = term
    k = 0
    while True:
        k += 1
        term *= -(half * half) / (k * (m + k))
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-30) or k > 200:
            return total


def _bessel_miller(m: int, z: float) -> float:
    # downward recurrence J_{k-1} = (2k/z) J_k - J_{k+1} from a start order
    # far enough above both m and z that the seed error has decayed away
    start = max(m, int(z)) + 2 * int(math.sqrt(40.0 * max(m, int(z)))) + 30
    if start % 2:
        start += 1
    jp = 0.0
    jc = 1e-30
    norm = 0.0
    result = 0.0
    for k in range(start, 0, -1):
        jm = (2.0 * k / z) * jc - jp
        jp = jc
        jc = jm
        if k - 1 == m:
            result = jc
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * jc
        if abs(jc) > 1e250:
            jc *= 1e-250
            jp *= 1e-250
            norm *= 1e-250
            result *= 1e-250
    norm += jc  # J_0 term
    return result / norm
