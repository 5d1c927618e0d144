"""Closed-form spectrum, ambiguity function and autocorrelation.

With c_m the coefficients of the periodic phase factor (see gbf),

    S(f) = sqrt(T) sum_m c_m sinc(pi T (f - m/T)),

    chi(tau, nu) = (1 - |tau|/T) sum_{m,n} c_m conj(c_n)
                   exp(-j pi (m + n) tau / T)
                   sinc(pi (1 - |tau|/T) (nu T + m - n)),

for |tau| <= T, zero outside, where sinc x = sin x / x.  The sign of the
exp(-j pi (m+n) tau / T) factor follows from substituting the coefficient
series into int s(t - tau/2) conj(s(t + tau/2)) exp(j 2 pi nu t) dt and is
pinned against the quadrature oracle by the test suite.  The autocorrelation
is R(tau) = chi(tau, 0).

The double sum is never evaluated naively: grouping by lag k = m - n makes
the sinc factor depend on k alone,

    chi(tau, nu) = A sum_k G_k(tau) sinc(pi A (nu T + k)),   A = 1 - |tau|/T,
    G_k(tau) = sum_n c_{n+k} conj(c_n) exp(-j pi (2n + k) tau / T),

so one correlation per tau serves every nu (O(M) per grid point).  On a
uniform tau grid the G_k become zero-padded DFTs over n and are batched
through one FFT per lag block (acf_uniform).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gbf import GbfCoefficients, compute_coefficients
from .waveform import OutOfSupport, WaveformSpec, spec_digest

# Sign of the residual linear-phase factor exp(j SIGMA pi (m+n) tau / T),
# fixed empirically against the quadrature oracle (see tests).
SIGMA = -1.0


@dataclass(frozen=True)
class SpectrumSamples:
    """Closed-form spectrum values S(f) on an explicit frequency grid."""

    f: np.ndarray
    values: np.ndarray
    spec_hash: str


@dataclass(frozen=True)
class AmbiguitySurface:
    """chi(tau, nu) on a delay/Doppler grid, row-major over tau."""

    tau: np.ndarray
    nu: np.ndarray
    chi: np.ndarray
    spec_hash: str


def _resolve_coeffs(spec, tol, coeffs):
    if coeffs is None:
        return compute_coefficients(spec, tol)
    return coeffs


def spectrum(spec: WaveformSpec, f_grid, tol: float = 1e-12,
             coeffs: GbfCoefficients | None = None) -> SpectrumSamples:
    """Evaluate S(f) on f_grid (Hz)."""
    coeffs = _resolve_coeffs(spec, tol, coeffs)
    f = np.atleast_1d(np.asarray(f_grid, dtype=float))
    m = coeffs.m_index
    vals = np.zeros(len(f), dtype=complex)
    step = max(1, (1 << 22) // max(len(m), 1))
    for i in range(0, len(f), step):
        blk = f[i:i + step]
        vals[i:i + step] = np.sinc(spec.T * blk[:, None] - m[None, :]) @ coeffs.c
    return SpectrumSamples(f=f, values=np.sqrt(spec.T) * vals,
                           spec_hash=coeffs.spec_hash)


def _lag_sums(coeffs: GbfCoefficients, T: float, tau: float) -> np.ndarray:
    """G_k(tau) for k = -2M..2M via one full correlation."""
    m = coeffs.m_index
    rot = np.exp(-1j * np.pi * m * tau / T)
    p = coeffs.c * rot
    q = coeffs.c * np.conj(rot)
    # correlate conjugates its second argument; output index k runs -2M..2M
    return np.correlate(p, q, mode="full")


def _chi_row(coeffs: GbfCoefficients, T: float, tau: float,
             nus: np.ndarray) -> np.ndarray:
    """chi(tau, nu) for one delay and many Dopplers."""
    A = (T - abs(tau)) / T
    if A <= 0.0:
        return np.zeros(len(nus), dtype=complex)
    G = _lag_sums(coeffs, T, tau)
    k = np.arange(-2 * coeffs.M, 2 * coeffs.M + 1)
    out = np.empty(len(nus), dtype=complex)
    step = max(1, (1 << 22) // len(k))
    for i in range(0, len(nus), step):
        blk = nus[i:i + step]
        snc = np.sinc(A * (blk[:, None] * T + k[None, :]))
        out[i:i + step] = np.sum(snc * G[None, :], axis=1)
    return A * out


def ambiguity(spec: WaveformSpec, tau: float, nu: float, tol: float = 1e-12,
              coeffs: GbfCoefficients | None = None) -> complex:
    """chi(tau, nu) at a single delay/Doppler point.

    Raises OutOfSupport for |tau| > T; chi(+-T, nu) = 0 exactly.
    """
    if abs(tau) > spec.T * (1.0 + 1e-12):
        raise OutOfSupport(f"|tau| = {abs(tau)} exceeds pulse length {spec.T}")
    coeffs = _resolve_coeffs(spec, tol, coeffs)
    return complex(_chi_row(coeffs, spec.T, float(tau), np.array([float(nu)]))[0])


def acf(spec: WaveformSpec, tau: float, tol: float = 1e-12,
        coeffs: GbfCoefficients | None = None) -> complex:
    """Autocorrelation R(tau) = chi(tau, 0)."""
    return ambiguity(spec, tau, 0.0, tol, coeffs)


def af_surface(spec: WaveformSpec, tau_grid, nu_grid, tol: float = 1e-12,
               coeffs: GbfCoefficients | None = None) -> AmbiguitySurface:
    """chi on the outer product of tau_grid and nu_grid.

    Fill order is row-major over tau with a fixed reduction order, so the
    result is reproducible bit for bit across runs.
    """
    coeffs = _resolve_coeffs(spec, tol, coeffs)
    taus = np.atleast_1d(np.asarray(tau_grid, dtype=float))
    nus = np.atleast_1d(np.asarray(nu_grid, dtype=float))
    if np.any(np.abs(taus) > spec.T * (1.0 + 1e-12)):
        raise OutOfSupport("tau grid extends beyond the pulse length")
    chi = np.empty((len(taus), len(nus)), dtype=complex)
    for i, tau in enumerate(taus):
        chi[i] = _chi_row(coeffs, spec.T, float(tau), nus)
    return AmbiguitySurface(tau=taus, nu=nus, chi=chi,
                            spec_hash=coeffs.spec_hash)


def acf_uniform(spec: WaveformSpec, n_tau: int = 4096, tol: float = 1e-12,
                coeffs: GbfCoefficients | None = None,
                weights: "AcfGridWeights | None" = None):
    """R(tau) on the uniform grid tau_j = j T / n_tau, j = 0..n_tau.

    The grid includes tau = T, where R vanishes identically.  Lag sums are
    evaluated for all grid points at once by batched FFT; precomputed
    weights for a given (M, n_tau) pairing can be supplied to amortize the
    trigonometric factors across many codes.

    Returns:
        (tau, R): arrays of length n_tau + 1.
    """
    coeffs = _resolve_coeffs(spec, tol, coeffs)
    T = spec.T
    tau = np.arange(n_tau + 1) * (T / n_tau)
    if n_tau < 2 * coeffs.M + 1:
        # grid too coarse for collision-free FFT binning; fall back to rows
        R = np.array([_chi_row(coeffs, T, float(tv), np.array([0.0]))[0]
                      for tv in tau])
        return tau, R
    if weights is not None and (weights.M != coeffs.M or weights.n_tau != n_tau):
        weights = None
    if weights is None:
        body = _apply_lag_weights(coeffs.c, coeffs.M, n_tau, None)
    else:
        body = weights.apply(coeffs.c)
    R = np.concatenate([body, [0.0]])
    return tau, R


_WEIGHT_CHUNK = 256


def _weight_block(kblk: np.ndarray, n_tau: int) -> np.ndarray:
    """w_k(tau_j) exp(-j pi k tau_j / T) on the uniform grid, one lag block.

    At tau_j = j T / n_tau the window factor A sinc(pi A k) collapses to
    -(-1)^k sin(pi k j / n_tau) / (pi k) for k != 0 and to 1 - j/n_tau for
    k = 0, independent of T.
    """
    frac = np.arange(n_tau) / n_tau
    x = np.pi * np.outer(kblk, frac)
    sx = np.sin(x)
    cx = np.cos(x)
    sgn = np.where(kblk % 2 == 0, 1.0, -1.0)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = -sgn * sx / (np.pi * kblk[:, None])
    zero = kblk == 0
    if np.any(zero):
        w[zero, :] = 1.0 - frac
    return w * (cx - 1j * sx)


def _apply_lag_weights(c: np.ndarray, M: int, n_tau: int, blocks) -> np.ndarray:
    """sum_k weight_k(tau_j) G_k(tau_j) over all lags, batched FFT per block."""
    n = np.arange(-M, M + 1)
    cpad = np.concatenate([np.zeros(2 * M, complex), c, np.zeros(2 * M, complex)])
    out = np.zeros(n_tau, dtype=complex)
    ks = np.arange(-2 * M, 2 * M + 1)
    for i, start in enumerate(range(0, len(ks), _WEIGHT_CHUNK)):
        kblk = ks[start:start + _WEIGHT_CHUNK]
        wblk = blocks[i] if blocks is not None else _weight_block(kblk, n_tau)
        idx = (kblk[:, None] + n[None, :]) + 3 * M
        W = cpad[idx] * np.conj(c)[None, :]
        Wp = np.zeros((len(kblk), n_tau), dtype=complex)
        Wp[:, n % n_tau] = W
        B = np.fft.fft(Wp, axis=1)
        out += np.sum(wblk * B, axis=0)
    return out


class AcfGridWeights:
    """Stored weight blocks for acf_uniform, reusable across many codes.

    Worth building only when evaluating a batch of codes that share the
    truncation order M, e.g. the phase-pair scan; costs
    (4M + 1) x n_tau complex doubles of memory.
    """

    def __init__(self, M: int, n_tau: int):
        self.M = M
        self.n_tau = n_tau
        ks = np.arange(-2 * M, 2 * M + 1)
        self._blocks = [
            _weight_block(ks[s:s + _WEIGHT_CHUNK], n_tau)
            for s in range(0, len(ks), _WEIGHT_CHUNK)
        ]

    def apply(self, c: np.ndarray) -> np.ndarray:
        if len(c) != 2 * self.M + 1:
            raise ValueError("coefficient length does not match weight order")
        return _apply_lag_weights(c, self.M, self.n_tau, self._blocks)


def write_spectrum_csv(samples: SpectrumSamples, path) -> None:
    with open(path, "w") as fh:
        fh.write("f,re,im,abs2\n")
        for f, v in zip(samples.f, samples.values):
            fh.write(f"{f:.17g},{v.real:.17g},{v.imag:.17g},{abs(v) ** 2:.17g}\n")


def write_surface_csv(surface: AmbiguitySurface, path) -> None:
    with open(path, "w") as fh:
        fh.write("tau,nu,re,im,abs2\n")
        for i, tau in enumerate(surface.tau):
            for j, nu in enumerate(surface.nu):
                v = surface.chi[i, j]
                fh.write(f"{tau:.17g},{nu:.17g},{v.real:.17g},"
                         f"{v.imag:.17g},{abs(v) ** 2:.17g}\n")


def write_acf_csv(tau: np.ndarray, R: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        fh.write("tau,re,im,abs2\n")
        for tv, rv in zip(tau, R):
            rv = complex(rv)
            fh.write(f"{tv:.17g},{rv.real:.17g},{rv.imag:.17g},{abs(rv) ** 2:.17g}\n")
