"""Dense complex linear algebra for small Hermitian problems.

The eigensolver is a cyclic complex Jacobi iteration; everything that needs a
spectrum (fractional powers, PSD checks) goes through :func:`eigh` so the
whole toolkit shares one numerical path.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BadAlpha, BadDim, BadRank, DimMismatch, NoConvergence, NotHermitian, NotPositive

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
MAX_SWEEPS = 100
OFFDIAG_RTOL = 1e-13
# eigenvalues this close to zero (relative to the largest) are round-off, not spectrum
_ZERO_RTOL = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self, values=None) -> np.ndarray:
        """Return ``V diag(values) V^dagger`` (the original matrix by default)."""
        if values is None:
            values = self.eigenvalues
        v = self.eigenvectors
        return (v * values) @ v.conj().T


def as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise BadDim(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def hermiticity_residual(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T)))


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_square(a)
    scale = max(1.0, float(np.max(np.abs(a))))
    res = hermiticity_residual(a)
    if res > tol * scale:
        raise NotHermitian(f"matrix is not Hermitian: max |A - A^dagger| = {res:.3e}")
    return a


def eigh(a) -> EigenDecomposition:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies the classical real Jacobi rotation, so the working matrix stays
    Hermitian with a real diagonal throughout.

    Raises:
        NotHermitian: if ``a`` fails the Hermiticity check.
        NoConvergence: if the off-diagonal norm does not drop below
            ``1e-13 * ||a||_F`` within 100 sweeps.
    """
    a = check_hermitian(a)
    n = a.shape[0]
    w = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    target = OFFDIAG_RTOL * np.linalg.norm(w)
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(MAX_SWEEPS + 1):
        off = np.linalg.norm(w[offdiag])
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(w, v, p, q)
    else:
        raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps (off-diagonal norm {off:.3e})")

    vals = np.diag(w).real.copy()
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], v[:, order].copy())


def _rotate(w: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = w[p, q]
    g = abs(apq)
    if g == 0.0:
        return
    phase = apq / g
    app = w[p, p].real
    aqq = w[q, q].real
    theta = (aqq - app) / (2.0 * g)
    if theta == 0.0:
        t = 1.0
    elif abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    cph = phase.conjugate()

    # W <- W G with G[:, p] = (c, -s*conj(phase)), G[:, q] = (s, c*conj(phase)) on rows (p, q)
    cp = w[:, p].copy()
    cq = w[:, q].copy()
    w[:, p] = c * cp - s * cph * cq
    w[:, q] = s * cp + c * cph * cq
    rp = w[p, :].copy()
    rq = w[q, :].copy()
    w[p, :] = c * rp - s * phase * rq
    w[q, :] = s * rp + c * phase * rq
    w[p, q] = 0.0
    w[q, p] = 0.0
    w[p, p] = app - t * g
    w[q, q] = aqq + t * g

    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = c * vp - s * cph * vq
    v[:, q] = s * vp + c * cph * vq


def min_eigenvalue(a) -> float:
    return float(eigh(a).eigenvalues[0])


def _clamped_spectrum(dec: EigenDecomposition, tol: float = PSD_TOL) -> np.ndarray:
    lam = dec.eigenvalues
    if lam[0] < -tol:
        raise NotPositive(f"matrix is not positive semidefinite: min eigenvalue {lam[0]:.3e}", min_eig=float(lam[0]))
    cutoff = _ZERO_RTOL * max(float(np.max(np.abs(lam))), 0.0)
    return np.where(lam <= cutoff, 0.0, lam)


def _check_alpha(alpha: float, closed_right: bool = True) -> None:
    ok = 0.0 < alpha <= 1.0 if closed_right else 0.0 < alpha < 1.0
    if not ok:
        raise BadAlpha(f"alpha must lie in (0, 1{']' if closed_right else ')'}, got {alpha}")


def _hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def psd_spectrum(rho) -> EigenDecomposition:
    """Eigendecomposition of a PSD matrix with its spectrum clamped to >= 0.

    Eigenvalues down to -1e-10, and positive ones at round-off level, become
    exact zeros; anything more negative raises :class:`NotPositive`. Results
    are cached per matrix so repeated fractional powers of one state reuse a
    single diagonalization.
    """
    a = as_square(rho)
    return _psd_spectrum_cached(a.tobytes(), a.shape[0])


@lru_cache(maxsize=512)
def _psd_spectrum_cached(buf: bytes, n: int) -> EigenDecomposition:
    a = np.frombuffer(buf, dtype=np.complex128).reshape(n, n)
    dec = eigh(a)
    lam = _clamped_spectrum(dec)
    lam.setflags(write=False)
    dec.eigenvectors.setflags(write=False)
    return EigenDecomposition(lam, dec.eigenvectors)


def matrix_power(rho, alpha: float) -> np.ndarray:
    """Fractional power ``rho**alpha`` of a PSD matrix, 0 < alpha <= 1."""
    _check_alpha(alpha)
    dec = psd_spectrum(rho)
    return _hermitize(dec.reconstruct(dec.eigenvalues**alpha))


def sqrt_density(rho) -> np.ndarray:
    return matrix_power(rho, 0.5)


def power_pair(rho, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """``(rho**alpha, rho**(1 - alpha))`` from a single eigendecomposition."""
    _check_alpha(alpha, closed_right=False)
    dec = psd_spectrum(rho)
    lam = dec.eigenvalues
    return _hermitize(dec.reconstruct(lam**alpha)), _hermitize(dec.reconstruct(lam ** (1.0 - alpha)))


def trace_power(rho, alpha: float) -> float:
    """``Tr(rho**alpha)`` computed from the clamped spectrum."""
    _check_alpha(alpha)
    return float(np.sum(psd_spectrum(rho).eigenvalues ** alpha))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^dagger b)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def check_density(rho, herm_tol: float = HERMITIAN_TOL, trace_tol: float = TRACE_TOL, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Validate a density matrix and return it as a complex array."""
    rho = as_square(rho)
    res = hermiticity_residual(rho)
    if res > herm_tol:
        raise NotHermitian(f"density matrix is not Hermitian (residual {res:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix must have unit trace, got {tr:.15g}")
    lam0 = min_eigenvalue(rho)
    if lam0 < -psd_tol:
        raise NotPositive(f"density matrix has negative eigenvalue {lam0:.3e}", min_eig=lam0)
    return rho


# -- random sampling -----------------------------------------------------------


@dataclass(frozen=True)
class RngSeed:
    """A (seed, stream) pair; equal pairs always reproduce the same draws."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.stream < 0:
            raise ValueError("stream id must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, stream: int) -> "RngSeed":
        return RngSeed(self.seed, stream)


def as_rng_seed(seed) -> RngSeed:
    if isinstance(seed, RngSeed):
        return seed
    return RngSeed(int(seed))


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_density(d: int, rank: int, seed) -> np.ndarray:
    """Random density matrix ``G G^dagger / Tr(G G^dagger)`` with ``G`` a d x rank Ginibre matrix."""
    if d < 1:
        raise BadDim(f"dimension must be positive, got {d}")
    if not 1 <= rank <= d:
        raise BadRank(f"rank must lie in 1..{d}, got {rank}")
    g = _ginibre(as_rng_seed(seed).generator(), (d, rank))
    rho = _hermitize(g @ g.conj().T)
    return rho / np.trace(rho).real


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128) / d


def haar_unitaries(d: int, count: int, seed) -> np.ndarray:
    """``count`` Haar-distributed d x d unitaries, stacked along axis 0.

    QR of a complex Ginibre matrix, with each column of Q rephased so that
    R has a positive real diagonal.
    """
    if d < 1:
        raise BadDim(f"dimension must be positive, got {d}")
    z = _ginibre(as_rng_seed(seed).generator(), (count, d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_unitary(d: int, seed) -> np.ndarray:
    return haar_unitaries(d, 1, seed)[0]
