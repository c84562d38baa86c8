"""Builders for complementary measurement families.

* MUMs: ``d + 1`` POVMs of ``d`` elements ``P_n^(b) = I/d + t F_n^(b)``.
* General SIC measurements: ``d**2`` elements ``P_k = I/d**2 + t D_k``.
* Complete MUB sets for prime ``d``.
* Exact SIC-POVMs for ``d`` in ``{2, 3}``.

Element arrays always carry the element index on the leading axes, so a MUM
is stored as an array of shape ``(d + 1, d, d, d)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bases import OperatorBasis, PartitionedBasis
from .errors import BadDim, BracketFailure, NotPositive, NotPrime, Unsupported, ZeroT
from .linalg import PSD_TOL, eigh, hermiticity_residual

SEARCH_PSD_TOL = 1e-12
SEARCH_ATOL = 1e-12
MIN_BRACKET = 1e-9
MAX_MUB_PRIME = 31


@dataclass(frozen=True)
class Povm:
    dim: int
    elements: np.ndarray  # shape (m, d, d)

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class MumSet:
    dim: int
    elements: np.ndarray  # shape (d + 1, d, d, d); elements[b, n] = P_{n+1}^{(b+1)}
    t: float
    kappa: float

    @property
    def povms(self) -> list[Povm]:
        return [Povm(self.dim, e) for e in self.elements]


@dataclass(frozen=True)
class GsmSet:
    """A general SIC measurement; ``t`` is ``None`` for the exact built-in SICs."""

    dim: int
    elements: np.ndarray  # shape (d*d, d, d)
    t: float | None
    a: float

    @property
    def povm(self) -> Povm:
        return Povm(self.dim, self.elements)


@dataclass(frozen=True)
class MubSet:
    dim: int
    vectors: np.ndarray  # shape (d + 1, d, d); vectors[b, n] is the n-th vector of basis b

    def projectors(self) -> np.ndarray:
        """Rank-one projectors, shape ``(d + 1, d, d, d)``."""
        v = self.vectors
        return np.einsum("bni,bnj->bnij", v, v.conj())

    @property
    def povms(self) -> list[Povm]:
        return [Povm(self.dim, p) for p in self.projectors()]


def kappa_of(d: int, t: float) -> float:
    return 1.0 / d + t * t * (1.0 + math.sqrt(d)) ** 2 * (d - 1)


def a_of(d: int, t: float) -> float:
    return 1.0 / d**3 + t * t * (d - 1) * (d + 1) ** 3


# -- MUMs ------------------------------------------------------------------------


def mum_directions(partition: PartitionedBasis) -> np.ndarray:
    """Traceless parts ``F_n^(b)``, shape ``(d + 1, d, d, d)``."""
    d = partition.dim
    sums = partition.group_sums
    out = np.empty((d + 1, d, d, d), dtype=np.complex128)
    out[:, : d - 1] = sums[:, None] - (d + math.sqrt(d)) * partition.groups
    out[:, d - 1] = (1.0 + math.sqrt(d)) * sums
    return out


def _min_eigs(ops: np.ndarray) -> np.ndarray:
    flat = ops.reshape(-1, *ops.shape[-2:])
    return np.array([eigh(op).eigenvalues[0] for op in flat]).reshape(ops.shape[:-2])


def _check_positive(elements: np.ndarray, t: float, label) -> None:
    mins = _min_eigs(elements)
    idx = np.unravel_index(np.argmin(mins), mins.shape)
    worst = float(mins[idx])
    if worst < -PSD_TOL:
        where = label(idx)
        raise NotPositive(f"t={t!r} gives a non-positive element at {where}: min eigenvalue {worst:.3e}", t=t, where=where, min_eig=worst)


def build_mum(partition: PartitionedBasis, t: float) -> MumSet:
    """Complete set of ``d + 1`` MUMs from a partitioned basis.

    Raises:
        ZeroT: for ``t == 0`` (``kappa`` would equal ``1/d``).
        NotPositive: if some element has an eigenvalue below ``-1e-10``; the
            error names the first such ``(b, n)`` pair (1-based).
    """
    if t == 0:
        raise ZeroT("t must be non-zero")
    d = partition.dim
    elements = np.eye(d) / d + t * mum_directions(partition)
    _check_positive(elements, t, lambda idx: (int(idx[0]) + 1, int(idx[1]) + 1))
    elements.setflags(write=False)
    return MumSet(d, elements, float(t), kappa_of(d, t))


def _search_max_t(d: int, base: float, directions: np.ndarray) -> float:
    # eigenvalues of base*I + t*D are base + t*lambda(D): one diagonalization per direction
    lowest = float(np.min(_min_eigs(directions)))

    def feasible(t):
        return base + t * lowest >= -SEARCH_PSD_TOL

    hi = float(d)
    if feasible(hi):
        return hi
    lo = hi
    while not feasible(lo):
        hi = lo
        lo *= 0.5
        if lo < MIN_BRACKET:
            if feasible(MIN_BRACKET):
                lo = MIN_BRACKET
                break
            raise BracketFailure(f"no positive t >= {MIN_BRACKET} keeps all elements positive")
    while hi - lo > SEARCH_ATOL:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def max_positive_t(partition: PartitionedBasis) -> float:
    """Largest ``t > 0`` (to 1e-12) for which :func:`build_mum` stays positive."""
    d = partition.dim
    t = _search_max_t(d, 1.0 / d, mum_directions(partition))
    build_mum(partition, t)
    return t


# -- general SIC measurements -------------------------------------------------------


def gsm_directions(basis: OperatorBasis) -> np.ndarray:
    """Traceless parts ``D_k`` of the ``d**2`` elements, shape ``(d*d, d, d)``."""
    d = basis.dim
    total = basis.ops.sum(axis=0)
    out = np.empty((d * d, d, d), dtype=np.complex128)
    out[:-1] = total[None] - d * (d + 1) * basis.ops
    out[-1] = (d + 1) * total
    return out


def build_gsm(basis: OperatorBasis, t: float) -> GsmSet:
    if t == 0:
        raise ZeroT("t must be non-zero")
    d = basis.dim
    elements = np.eye(d) / d**2 + t * gsm_directions(basis)
    _check_positive(elements, t, lambda idx: int(idx[0]) + 1)
    elements.setflags(write=False)
    return GsmSet(d, elements, float(t), a_of(d, t))


def max_positive_t_gsm(basis: OperatorBasis) -> float:
    d = basis.dim
    t = _search_max_t(d, 1.0 / d**2, gsm_directions(basis))
    build_gsm(basis, t)
    return t


# -- MUBs and exact SICs ---------------------------------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


def _is_prime_power(n: int) -> bool:
    for p in range(2, n + 1):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return n == 1
    return False


def build_mub_prime(d: int) -> MubSet:
    """Complete set of ``d + 1`` MUBs for prime ``d``.

    For odd ``d`` the bases are the computational basis and the quadratic
    phase bases ``|psi_n^(b)> = d**-0.5 sum_j w**(b j**2 + n j) |j>``,
    ``b = 0..d-1``. For ``d = 2`` they are the eigenbases of Z, X and Y.
    """
    if int(d) != d or d < 2:
        raise BadDim(f"dimension must be an integer >= 2, got {d}")
    if not _is_prime(d):
        if _is_prime_power(d):
            raise Unsupported(f"MUBs for prime-power dimension {d} are not implemented")
        raise NotPrime(f"{d} is not prime")
    if d > MAX_MUB_PRIME:
        raise Unsupported(f"MUB construction is limited to d <= {MAX_MUB_PRIME}")

    vecs = np.zeros((d + 1, d, d), dtype=np.complex128)
    vecs[0] = np.eye(d)
    if d == 2:
        s = 1 / math.sqrt(2)
        vecs[1] = [[s, s], [s, -s]]
        vecs[2] = [[s, 1j * s], [s, -1j * s]]
    else:
        j = np.arange(d)
        for b in range(d):
            for n in range(d):
                phase = (b * j * j + n * j) % d
                vecs[b + 1, n] = np.exp(2j * np.pi * phase / d) / math.sqrt(d)
    vecs.setflags(write=False)
    return MubSet(d, vecs)


_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)


def _tetrahedron_sic() -> np.ndarray:
    r = math.sqrt(2.0) / 3.0
    bloch = np.array(
        [
            [0.0, 0.0, 1.0],
            [2 * r, 0.0, -1 / 3],
            [-r, math.sqrt(2.0 / 3.0), -1 / 3],
            [-r, -math.sqrt(2.0 / 3.0), -1 / 3],
        ]
    )
    return (np.eye(2) + np.einsum("ka,aij->kij", bloch, _PAULI)) / 4.0


def _hesse_sic() -> np.ndarray:
    d = 3
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)  # X|j> = |j+1 mod 3>
    clock = np.diag(omega ** np.arange(d))
    fid = np.array([0, 1, -1], dtype=np.complex128) / math.sqrt(2)
    out = []
    for p in range(d):
        for q in range(d):
            psi = np.linalg.matrix_power(shift, p) @ np.linalg.matrix_power(clock, q) @ fid
            out.append(np.outer(psi, psi.conj()) / d)
    return np.array(out)


def builtin_sic(d: int) -> GsmSet:
    """Exact SIC-POVM for ``d = 2`` (tetrahedron) or ``d = 3`` (Hesse configuration)."""
    if d == 2:
        elements = _tetrahedron_sic()
    elif d == 3:
        elements = _hesse_sic()
    else:
        raise Unsupported(f"no built-in SIC-POVM for d={d}")
    elements.setflags(write=False)
    return GsmSet(d, elements, None, 1.0 / d**2)


# -- validation --------------------------------------------------------------------


@dataclass
class FamilyReport:
    """Per-condition maximum residuals for a measurement family.

    Positivity is judged against the fixed PSD tolerance (1e-10); every other
    condition is judged against ``tol``.
    """

    kind: str
    dim: int
    tol: float
    residuals: dict[str, float] = field(default_factory=dict)
    failed: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failed

    def max_residual(self) -> float:
        return max((v for k, v in self.residuals.items() if k != "positivity"), default=0.0)


def _elementwise_checks(elements: np.ndarray) -> dict[str, float]:
    flat = elements.reshape(-1, *elements.shape[-2:])
    herm = max(hermiticity_residual(e) for e in flat)
    mins = [float(np.linalg.eigvalsh(0.5 * (e + e.conj().T))[0]) for e in flat]
    return {"hermiticity": herm, "positivity": max(0.0, -min(mins))}


def _completeness(elements: np.ndarray) -> float:
    d = elements.shape[-1]
    return float(np.max(np.abs(elements.sum(axis=0) - np.eye(d))))


def _overlaps(elements: np.ndarray) -> np.ndarray:
    return np.einsum("kij,lji->kl", elements, elements).real


def _mum_residuals(m: MumSet) -> dict[str, float]:
    d = m.dim
    els = np.asarray(m.elements)
    res = _elementwise_checks(els)
    res["completeness"] = max(_completeness(e) for e in els)
    flat = els.reshape(-1, d, d)
    res["unit_trace"] = float(np.max(np.abs(np.einsum("kii->k", flat) - 1.0)))
    gram = _overlaps(flat).reshape(d + 1, d, d + 1, d)
    same = np.eye(d + 1, dtype=bool)[:, None, :, None] & np.ones((1, d, 1, d), dtype=bool)
    eye_n = np.eye(d, dtype=bool)[None, :, None, :]
    intra_expected = np.where(eye_n, m.kappa, (1.0 - m.kappa) / (d - 1))
    res["cross_overlap"] = float(np.max(np.abs(gram - 1.0 / d)[~same]))
    intra = np.abs(gram - np.broadcast_to(intra_expected, gram.shape))[same]
    res["intra_overlap"] = float(np.max(intra))
    res["kappa_range"] = _range_violation(m.kappa, 1.0 / d, 1.0)
    return res


def _gsm_residuals(g: GsmSet) -> dict[str, float]:
    d = g.dim
    els = np.asarray(g.elements)
    res = _elementwise_checks(els)
    res["completeness"] = _completeness(els)
    gram = _overlaps(els)
    off = ~np.eye(d * d, dtype=bool)
    res["self_overlap"] = float(np.max(np.abs(np.diag(gram) - g.a)))
    res["cross_overlap"] = float(np.max(np.abs(gram[off] - (1.0 - d * g.a) / (d * (d * d - 1)))))
    res["a_range"] = _range_violation(g.a, 1.0 / d**3, 1.0 / d**2)
    return res


def _mub_residuals(m: MubSet) -> dict[str, float]:
    d = m.dim
    v = np.asarray(m.vectors)
    # overlaps[b, n, c, k] = <v_bn | v_ck>
    ov = np.einsum("bni,cki->bnck", v.conj(), v)
    same = np.eye(d + 1, dtype=bool)[:, None, :, None] & np.ones((1, d, 1, d), dtype=bool)
    ortho = ov - np.eye(d)[None, :, None, :]
    return {
        "orthonormality": float(np.max(np.abs(ortho)[same])),
        "unbiasedness": float(np.max(np.abs(np.abs(ov) - 1 / math.sqrt(d))[~same])),
    }


def _range_violation(x: float, lo: float, hi: float, slack: float = 1e-12) -> float:
    """Distance of ``x`` outside ``(lo, hi]``; zero when inside up to ``slack``."""
    if x <= lo:
        return lo - x + slack
    return max(0.0, x - hi - slack)


def verify_povm_family(family, tol: float = 1e-10) -> FamilyReport:
    """Check the defining conditions of a MUM, general SIC or MUB family.

    Never raises on a bad family; failures are listed in the report.
    """
    if isinstance(family, MumSet):
        kind, res = "mum", _mum_residuals(family)
    elif isinstance(family, GsmSet):
        kind, res = ("sic" if family.t is None else "gsm"), _gsm_residuals(family)
    elif isinstance(family, MubSet):
        kind, res = "mub", _mub_residuals(family)
    else:
        raise TypeError(f"unsupported family type {type(family).__name__}")
    failed = []
    for name, value in res.items():
        limit = PSD_TOL if name == "positivity" else tol
        if not value <= limit:
            failed.append(name)
    return FamilyReport(kind, family.dim, tol, res, failed)
