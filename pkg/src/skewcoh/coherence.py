"""Skew-information coherence quantities and their closed forms.

Brute-force sums evaluate ``I_alpha(rho, X) = -1/2 Tr([rho^a, X][rho^(1-a), X])``
element by element. The fractional powers of ``rho`` are computed once per
call and shared by every element of the measurement being summed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bases import ObservableSet, observable_set
from .errors import BadA, BadAlpha, BadKappa, DimMismatch, NotPrime, Unsupported
from .linalg import as_rng_seed, check_hermitian, haar_unitaries, power_pair, sqrt_density, trace_power
from .measurements import GsmSet, MubSet, MumSet, Povm, build_mub_prime, builtin_sic

CLAMP_TOL = 1e-12
PURITY_MARGIN = 1e-6
_MC_CHUNK = 4096


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise BadAlpha(f"alpha must lie in (0, 1), got {alpha}")


def _elements(measurement) -> np.ndarray:
    if isinstance(measurement, Povm):
        ops = measurement.elements
    elif isinstance(measurement, (MumSet, GsmSet)):
        ops = measurement.elements
    elif isinstance(measurement, MubSet):
        ops = measurement.projectors()
    else:
        ops = measurement
    ops = np.asarray(ops, dtype=np.complex128)
    return ops.reshape(-1, *ops.shape[-2:])


def _wyd_terms(ra: np.ndarray, rb: np.ndarray, ops: np.ndarray) -> np.ndarray:
    """``I_alpha`` for every operator in the stack ``ops`` given ``ra = rho^a``, ``rb = rho^(1-a)``."""
    ca = ra @ ops - ops @ ra
    cb = rb @ ops - ops @ rb
    vals = -0.5 * np.einsum("kij,kji->k", ca, cb).real
    return np.where((vals < 0) & (vals >= -CLAMP_TOL), 0.0, vals)


def _check_operator(rho: np.ndarray, m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != rho.shape:
        raise DimMismatch(f"operator shape {m.shape} does not match state shape {rho.shape}")
    return check_hermitian(m)


def skew_information(rho, m) -> float:
    """Wigner-Yanase skew information ``-1/2 Tr([sqrt(rho), M]^2)``.

    Evaluated in the expanded form ``Tr(M^2 rho) - Tr(sqrt(rho) M sqrt(rho) M)``,
    which is a separate route from :func:`wyd_information` at ``alpha = 1/2``.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    m = _check_operator(rho, m)
    s = sqrt_density(rho)
    sm = s @ m
    val = float(np.trace(m @ m @ rho).real - np.trace(sm @ sm).real)
    return 0.0 if -CLAMP_TOL <= val < 0 else val


def wyd_information(rho, m, alpha: float) -> float:
    """Wigner-Yanase-Dyson information ``Tr(M^2 rho) - Tr(rho^a M rho^(1-a) M)``."""
    _check_alpha(alpha)
    rho = np.asarray(rho, dtype=np.complex128)
    m = _check_operator(rho, m)
    ra, rb = power_pair(rho, alpha)
    return float(_wyd_terms(ra, rb, m[None])[0])


def q_measure(rho, measurement, alpha: float = 0.5) -> float:
    """Sum of ``I_alpha(rho, M_i)`` over the elements of a measurement."""
    _check_alpha(alpha)
    rho = np.asarray(rho, dtype=np.complex128)
    ops = _elements(measurement)
    if ops.shape[-2:] != rho.shape:
        raise DimMismatch(f"measurement acts on dimension {ops.shape[-1]}, state on {rho.shape[0]}")
    ra, rb = power_pair(rho, alpha)
    return float(np.sum(_wyd_terms(ra, rb, ops)))


def wyd_uncertainty(rho, alpha: float = 0.5) -> float:
    """``d - Tr(rho^a) Tr(rho^(1-a))``; equals ``d - (Tr sqrt(rho))**2`` at ``alpha = 1/2``."""
    _check_alpha(alpha)
    d = np.shape(rho)[0]
    return d - trace_power(rho, alpha) * trace_power(rho, 1.0 - alpha)


# -- MUMs ----------------------------------------------------------------------------


def avg_coherence_mum(rho, mum: MumSet, alpha: float = 0.5) -> float:
    return q_measure(rho, mum, alpha) / (mum.dim + 1)


def closed_form_mum(rho, d: int, kappa: float, alpha: float = 0.5) -> float:
    if not 1.0 / d < kappa <= 1.0 + CLAMP_TOL:
        raise BadKappa(f"kappa must lie in (1/d, 1], got {kappa}")
    return (kappa * d - 1) / (d * d - 1) * wyd_uncertainty(rho, alpha)


# -- observables, MUBs, SICs, general SIC measurements -------------------------------


def q_alpha_uncertainty(rho, alpha: float, obs: ObservableSet | None = None) -> tuple[float, float]:
    """Brute ``sum_i I_alpha(rho, H_i)`` over an orthonormal observable set, and its closed form."""
    d = np.shape(rho)[0]
    obs = observable_set(d) if obs is None else obs
    return q_measure(rho, obs.ops, alpha), wyd_uncertainty(rho, alpha)


def c_max(rho, obs: ObservableSet | None = None, alpha: float = 0.5) -> tuple[float, float]:
    d = np.shape(rho)[0]
    brute, closed = q_alpha_uncertainty(rho, alpha, obs)
    return brute / d, closed / d


def c_mub_closed(rho, alpha: float = 0.5) -> float:
    return wyd_uncertainty(rho, alpha) / (np.shape(rho)[0] + 1)


def c_mub(rho, mub: MubSet, alpha: float = 0.5) -> tuple[float, float]:
    return q_measure(rho, mub, alpha) / (mub.dim + 1), c_mub_closed(rho, alpha)


def c_sic_closed(rho, alpha: float = 0.5) -> float:
    d = np.shape(rho)[0]
    return wyd_uncertainty(rho, alpha) / (d * (d + 1))


def avg_coherence_gsm(rho, gsm: GsmSet, alpha: float = 0.5) -> float:
    return q_measure(rho, gsm, alpha)


def closed_form_gsm(rho, d: int, a: float, alpha: float = 0.5) -> float:
    if not 1.0 / d**3 < a <= 1.0 / d**2 + CLAMP_TOL:
        raise BadA(f"a must lie in (1/d^3, 1/d^2], got {a}")
    return (a * d**3 - 1) / (d * (d * d - 1)) * wyd_uncertainty(rho, alpha)


# -- Haar average ----------------------------------------------------------------------


class MonteCarloEstimate(NamedTuple):
    estimate: float
    std_error: float
    closed: float

    @property
    def z_score(self) -> float:
        diff = self.estimate - self.closed
        if self.std_error == 0.0:
            # every sample identical (e.g. the maximally mixed state)
            return 0.0 if abs(diff) <= CLAMP_TOL else math.copysign(math.inf, diff)
        return diff / self.std_error


def c_u_monte_carlo(rho, samples: int, seed, alpha: float = 0.5) -> MonteCarloEstimate:
    """Monte Carlo estimate of the Haar average of ``Q(rho, U Pi U^dagger)``.

    ``Pi`` is the computational-basis projective measurement; the standard
    error is the sample standard deviation over ``sqrt(samples)``.
    """
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    _check_alpha(alpha)
    rho = np.asarray(rho, dtype=np.complex128)
    d = rho.shape[0]
    ra, rb = power_pair(rho, alpha)
    unitaries = haar_unitaries(d, samples, as_rng_seed(seed))
    values = np.empty(samples)
    for start in range(0, samples, _MC_CHUNK):
        u = unitaries[start : start + _MC_CHUNK]
        proj = np.einsum("kai,kbi->kiab", u, u.conj()).reshape(-1, d, d)
        values[start : start + len(u)] = _wyd_terms(ra, rb, proj).reshape(len(u), d).sum(axis=1)
    std_error = float(values.std(ddof=1) / math.sqrt(samples))
    return MonteCarloEstimate(float(values.mean()), std_error, c_mub_closed(rho, alpha))


# -- report ----------------------------------------------------------------------------


@dataclass
class Quantity:
    brute: float | None = None
    closed: float | None = None

    @property
    def residual(self) -> float | None:
        if self.brute is None or self.closed is None:
            return None
        return abs(self.brute - self.closed)

    @property
    def value(self) -> float:
        return self.brute if self.brute is not None else self.closed

    def to_json(self) -> dict:
        return {"brute": self.brute, "closed": self.closed, "residual": self.residual}


@dataclass
class Relation:
    lhs: float | None
    rhs: float | None

    @property
    def residual(self) -> float | None:
        if self.lhs is None or self.rhs is None:
            return None
        return abs(self.lhs - self.rhs)

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "residual": self.residual}


@dataclass
class CoherenceReport:
    dim: int
    state_id: str
    alpha: float
    quantities: dict[str, Quantity] = field(default_factory=dict)
    c_u: MonteCarloEstimate | None = None
    relations: dict[str, Relation] = field(default_factory=dict)
    ordering_ok: bool = True
    ordering_degenerate: bool = False
    kappa: float | None = None
    a: float | None = None
    samples: int | None = None

    def to_json(self) -> dict:
        quantities = {name: q.to_json() for name, q in self.quantities.items()}
        if self.c_u is not None:
            quantities["c_u"] = {
                "estimate": self.c_u.estimate,
                "std_error": self.c_u.std_error,
                "closed": self.c_u.closed,
                "z": self.c_u.z_score,
            }
        relations = {name: r.to_json() for name, r in self.relations.items()}
        relations["ordering_ok"] = self.ordering_ok
        relations["ordering_degenerate"] = self.ordering_degenerate
        return {
            "dim": self.dim,
            "state_id": self.state_id,
            "alpha": self.alpha,
            "params": {"alpha": self.alpha, "kappa": self.kappa, "a": self.a, "samples": self.samples},
            "quantities": quantities,
            "relations": relations,
        }


def _ratio(num, den):
    if num is None or den is None or den == 0.0:
        return None
    return num / den


def relations_report(
    rho,
    mum: MumSet | None = None,
    gsm: GsmSet | None = None,
    *,
    mub: MubSet | None = None,
    sic: GsmSet | None = None,
    alpha: float = 0.5,
    samples: int | None = None,
    seed=None,
    state_id: str = "",
    auto_builtin: bool = True,
) -> CoherenceReport:
    """Evaluate every average coherence available for ``rho`` and check their relations.

    Closed forms are always reported. Brute-force values are added for each
    measurement supplied; with ``auto_builtin`` the MUB set (prime ``d``) and
    the exact SIC (``d`` in ``{2, 3}``) are built when not supplied. A Haar
    Monte Carlo estimate is included when ``samples`` is given.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    d = rho.shape[0]
    if auto_builtin:
        if mub is None:
            try:
                mub = build_mub_prime(d)
            except (Unsupported, NotPrime):
                pass
        if sic is None and d in (2, 3):
            sic = builtin_sic(d)
    if mum is None and gsm is None and mub is None and sic is None:
        raise ValueError("at least one measurement family is required")

    unc = wyd_uncertainty(rho, alpha)
    rep = CoherenceReport(d, state_id, alpha, samples=samples)
    q = rep.quantities
    cmax_brute, _ = c_max(rho, alpha=alpha)
    q["c_max"] = Quantity(cmax_brute, unc / d)
    q["c_mub"] = Quantity(q_measure(rho, mub, alpha) / (d + 1) if mub is not None else None, unc / (d + 1))
    q["c_sic"] = Quantity(q_measure(rho, sic, alpha) if sic is not None else None, unc / (d * (d + 1)))
    if mum is not None:
        rep.kappa = mum.kappa
        q["c_mum"] = Quantity(avg_coherence_mum(rho, mum, alpha), closed_form_mum(rho, d, mum.kappa, alpha))
    if gsm is not None:
        rep.a = gsm.a
        q["c_gsm"] = Quantity(avg_coherence_gsm(rho, gsm, alpha), closed_form_gsm(rho, d, gsm.a, alpha))
    if samples is not None:
        if seed is None:
            raise ValueError("a seed is required for the Monte Carlo estimate")
        rep.c_u = c_u_monte_carlo(rho, samples, seed, alpha)

    rel = rep.relations
    cmax = q["c_max"].closed
    rel["c_mub_eq_d_c_sic"] = Relation(q["c_mub"].closed, d * q["c_sic"].closed)
    rel["c_sic_over_c_max"] = Relation(_ratio(q["c_sic"].value, cmax), 1.0 / (d + 1))
    if mum is not None:
        k = mum.kappa
        c_mum = q["c_mum"].brute
        rel["c_mum_over_c_max"] = Relation(_ratio(c_mum, cmax), d * (k * d - 1) / (d * d - 1))
        rel["c_mum_over_c_mub"] = Relation(_ratio(c_mum, q["c_mub"].closed), (k * d - 1) / (d - 1))
        if gsm is not None:
            factor = (k * d * d - d) / (gsm.a * d**3 - 1)
            rel["mum_gsm_link"] = Relation(c_mum, factor * q["c_gsm"].brute)

    purity = float(np.trace(rho @ rho).real)
    rep.ordering_degenerate = purity <= 1.0 / d + PURITY_MARGIN
    c_mub_value = q["c_mub"].value
    ok = True
    if mum is not None:
        ok &= q["c_mum"].value <= c_mub_value + 1e-10
    if gsm is not None:
        ok &= q["c_gsm"].value <= q["c_sic"].closed + 1e-10
    # near the maximally mixed state every value is ~0 and strictness is meaningless
    if not rep.ordering_degenerate:
        ok &= q["c_sic"].value < c_mub_value < cmax
    rep.ordering_ok = bool(ok)
    return rep
