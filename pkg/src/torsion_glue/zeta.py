"""Hurwitz zeta continuation and zeta-regularized determinants of model spectra.

Sign conventions: for a positive spectrum {mu_k} the progression value is
-d/ds sum mu_k^{-2s} at s = 0 (so a single eigenvalue mu contributes log mu),
and a graded model zeta weights degree p by (-1)^p p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import gammaln

from .hermitian import log_det_star
from .scattering import (LimitingSubspace, ScatteringMatrix, c12_matrix, c_bd, chi_euler, chi_prime_of,
                         kernel_dim, scattering_from_subspace)

# Euler-Maclaurin depth: N explicit terms (fewer for Re s < 0 to limit cancellation), J Bernoulli corrections.
EM_TERMS = 24
EM_TERMS_NEGATIVE = 8
EM_CORRECTIONS = 14
PHASE_SNAP = 1e-9


@lru_cache(maxsize=None)
def _bernoulli_coeffs(j: int) -> tuple[np.longdouble, ...]:
    """B_{2i}/(2i)! for i = 1..j, exact rationals (Akiyama-Tanigawa) rounded once."""
    a = [Fraction(0)] * (2 * j + 1)
    b = []
    for m in range(2 * j + 1):
        a[m] = Fraction(1, m + 1)
        for r in range(m, 0, -1):
            a[r - 1] = r * (a[r - 1] - a[r])
        b.append(a[0])
    return tuple(np.longdouble(b[2 * i].numerator) / np.longdouble(b[2 * i].denominator * factorial(2 * i))
                 for i in range(1, j + 1))


def _poch_series(s: complex, j: int) -> list[tuple[complex, complex]]:
    """(s)_{2i-1} and its s-derivative for i = 1..j, built incrementally."""
    out = []
    val, der = s, s * 0 + 1
    for i in range(1, j + 1):
        out.append((val, der))
        a, b = s + 2 * i - 1, s + 2 * i
        der = der * a * b + val * (a + b)
        val = val * a * b
    return out


def hurwitz_zeta(s: complex, a: float, derivative: int = 0) -> complex:
    """zeta_H(s, a) = sum_{k>=0} (k+a)^{-s} (derivative=1 gives d/ds)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if derivative not in (0, 1):
        raise ValueError("derivative must be 0 or 1")
    s = complex(s)
    if s == 1:
        raise ValueError("pole at s = 1")
    n = (EM_TERMS if s.real >= 0 else EM_TERMS_NEGATIVE) + int(np.ceil(abs(s.imag)))
    # extended precision absorbs the cancellation between the partial sum and the tail
    sl = np.clongdouble(s)
    k = np.arange(n, dtype=np.longdouble) + np.longdouble(a)
    logk = np.log(k)
    terms = np.exp(-sl * logk)
    x = np.longdouble(n) + np.longdouble(a)
    lx = np.log(x)
    xs = np.exp(-sl * lx)
    pochs = _poch_series(sl, EM_CORRECTIONS)
    coeffs = _bernoulli_coeffs(EM_CORRECTIONS)
    if derivative == 0:
        total = np.sum(terms) + x * xs / (sl - 1) + xs / 2
        for i, (c, (poch, _)) in enumerate(zip(coeffs, pochs), start=1):
            total += c * poch * xs * x ** (1 - 2 * i)
        return complex(total)
    total = -np.sum(logk * terms) - lx * x * xs / (sl - 1) - x * xs / (sl - 1) ** 2 - lx * xs / 2
    for i, (c, (poch, dpoch)) in enumerate(zip(coeffs, pochs), start=1):
        total += c * (dpoch - lx * poch) * xs * x ** (1 - 2 * i)
    return complex(total)


def _check_theta(theta: float, upper: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= upper:
        raise ValueError(f"theta={theta} outside [0, {upper}]")
    return theta


def progression_zeta_prime0(theta: float, R: float) -> float:
    """Closed form: log(4R) at theta = 0, (1/2) log(2 - 2 cos theta) for 0 < theta <= pi.

    For 0 < theta < pi this is the per-branch share of the conjugate pair
    {theta, 2 pi - theta}; for theta in {0, pi} it is the exact value of the
    single progression ((2 pi k - theta)/(4R))^2, k >= 1.
    """
    theta = _check_theta(theta, np.pi)
    if R <= 0:
        raise ValueError("R must be positive")
    if theta == 0.0:
        return float(np.log(4 * R))
    return float(0.5 * np.log(2 - 2 * np.cos(theta)))


def single_progression_zeta_prime0(theta: float, R: float) -> float:
    """-d/ds sum_{k>=1} ((2 pi k - theta)/(4R))^{-2s} at s = 0, theta in [0, 2 pi), via hurwitz_zeta."""
    theta = float(theta)
    if not 0.0 <= theta < 2 * np.pi:
        raise ValueError(f"theta={theta} outside [0, 2 pi)")
    a = 1.0 - theta / (2 * np.pi)
    scale = np.log(2 * np.pi / (4 * R))
    z0 = hurwitz_zeta(0.0, a).real
    dz0 = hurwitz_zeta(0.0, a, derivative=1).real
    return float(2 * scale * z0 - 2 * dz0)


def single_progression_closed(theta: float, R: float) -> float:
    """Same value from zeta_H(0,a) = 1/2 - a and zeta_H'(0,a) = log Gamma(a) - log(2 pi)/2."""
    a = 1.0 - theta / (2 * np.pi)
    return float(2 * np.log(2 * np.pi / (4 * R)) * (0.5 - a) - 2 * (gammaln(a) - 0.5 * np.log(2 * np.pi)))


def progression_pair_share(theta: float, R: float) -> float:
    """Half the value of the pair {theta, 2 pi - theta}; equals the single progression at 0 and pi."""
    theta = _check_theta(theta, np.pi)
    if theta == 0.0:
        return single_progression_zeta_prime0(0.0, R)
    return 0.5 * (single_progression_zeta_prime0(theta, R) + single_progression_zeta_prime0(2 * np.pi - theta, R))


@dataclass(frozen=True)
class Progression:
    """The spectrum {((2 pi k - theta)/(4R))^2 : k >= 1} in form degree ``degree``."""

    theta: float
    R: float
    degree: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        if not 0.0 <= self.theta < 2 * np.pi:
            raise ValueError("theta must lie in [0, 2 pi)")
        if self.multiplicity < 1 or self.R <= 0:
            raise ValueError("need multiplicity >= 1 and R > 0")

    def eigenvalues(self, count: int) -> np.ndarray:
        k = np.arange(1, count + 1)
        return ((2 * np.pi * k - self.theta) / (4 * self.R)) ** 2

    def zeta_prime0(self) -> float:
        return single_progression_zeta_prime0(self.theta, self.R)


@dataclass(frozen=True)
class ZetaResult:
    zeta_prime_0: float
    decomposition: tuple[tuple[Progression, float], ...] = field(repr=False)


@dataclass
class EigenvalueCatalog:
    entries: list[Progression] = field(default_factory=list)

    @classmethod
    def from_matrix(cls, c: np.ndarray, R: float, degree: int = 0) -> "EigenvalueCatalog":
        """Positive roots of det(exp(4 i R lambda) C - 1), grouped by eigenphase."""
        ph = np.angle(np.linalg.eigvals(np.asarray(c, dtype=complex)))
        ph = np.where(np.abs(ph) < PHASE_SNAP, 0.0, ph)
        theta = np.mod(ph, 2 * np.pi)
        theta = np.where(theta > 2 * np.pi - PHASE_SNAP, 0.0, theta)
        entries: list[Progression] = []
        for t in np.sort(theta):
            if entries and abs(entries[-1].theta - t) < PHASE_SNAP:
                e = entries[-1]
                entries[-1] = Progression(e.theta, e.R, e.degree, e.multiplicity + 1)
            else:
                entries.append(Progression(float(t), float(R), degree))
        return cls(entries)

    def __add__(self, other: "EigenvalueCatalog") -> "EigenvalueCatalog":
        return EigenvalueCatalog(self.entries + other.entries)

    def sorted_entries(self) -> list[Progression]:
        return sorted(self.entries, key=lambda e: (e.degree, e.theta, e.R))

    def zeta_prime0(self, weighted: bool = False) -> ZetaResult:
        """Sum of progression values; ``weighted`` applies (-1)^p p by degree."""
        parts = []
        for e in self.sorted_entries():
            w = (-1) ** e.degree * e.degree if weighted else 1
            parts.append((e, w * e.multiplicity * e.zeta_prime0()))
        return ZetaResult(float(sum(v for _, v in parts)), tuple(parts))


def _conjugation_closed(c: np.ndarray, tol: float = 1e-8) -> bool:
    w = np.linalg.eigvals(c)
    a = np.sort_complex(np.round(w, 9))
    b = np.sort_complex(np.round(np.conj(w), 9))
    return bool(np.max(np.abs(a - b), initial=0.0) < tol * 10) or _matching_conj(w, tol)


def _matching_conj(w: np.ndarray, tol: float) -> bool:
    from scipy.optimize import linear_sum_assignment

    cost = np.abs(w[:, None] - np.conj(w)[None, :])
    r, c = linear_sum_assignment(cost)
    return bool(np.max(cost[r, c], initial=0.0) < 1e3 * tol)


def model_zeta_prime0(c, R: float) -> float:
    """r log(2R) + m log 2 + (1/2) log det*((2 - C - C^{-1})/4)."""
    c = np.asarray(c, dtype=complex)
    m = len(c)
    if m == 0:
        return 0.0
    if np.max(np.abs(c.conj().T @ c - np.eye(m))) > 1e-8:
        raise ValueError("C is not unitary")
    if not _conjugation_closed(c):
        raise ValueError("spectrum of C is not closed under conjugation")
    r = kernel_dim(c)
    a = (2 * np.eye(m) - c - c.conj().T) / 4
    return float(r * np.log(2 * R) + m * np.log(2) + 0.5 * log_det_star(0.5 * (a + a.conj().T)))


def weighted_model_zeta_prime0(C: ScatteringMatrix, R: float) -> float:
    """sum_p (-1)^p p zeta'_{C^p, R}(0)."""
    return sum((-1) ** p * p * model_zeta_prime0(b, R) for p, b in enumerate(C.blocks))


def model_weighted_zeta_prime0(which: str, L1: LimitingSubspace, L2: LimitingSubspace, R: float) -> float:
    """Closed forms for the glued and the two boundary model problems."""
    y = L1.ymodel
    chi = chi_euler(y)
    if which == "glued":
        c12 = c12_matrix(L1, L2)
        det_term = 0.0
        for p, b in enumerate(c12.blocks):
            if len(b):
                a = (2 * np.eye(len(b)) - b - np.linalg.inv(b)) / 4
                det_term += 0.5 * p * (-1) ** p * log_det_star(0.5 * (a + a.conj().T))
        return float(chi_prime_of(c12) * np.log(2 * R) - chi * np.log(2) + det_term)
    if which in ("side1", "side2"):
        side = 1 if which == "side1" else 2
        L = L1 if side == 1 else L2
        cbd = c_bd(scattering_from_subspace(L), side)
        return float(chi_prime_of(cbd) * np.log(R) - chi * np.log(2))
    raise ValueError(f"which must be glued, side1 or side2, got {which!r}")


def model_catalog(which: str, L1: LimitingSubspace, L2: LimitingSubspace, R: float) -> EigenvalueCatalog:
    """Spectral catalog of a model problem: C12 blocks at R, boundary blocks at R/2."""
    if which == "glued":
        mats, rr = c12_matrix(L1, L2).blocks, R
    elif which in ("side1", "side2"):
        side = 1 if which == "side1" else 2
        mats = c_bd(scattering_from_subspace(L1 if side == 1 else L2), side).blocks
        rr = R / 2
    else:
        raise ValueError(f"unknown model problem {which!r}")
    cat = EigenvalueCatalog()
    for p, b in enumerate(mats):
        if len(b):
            cat = cat + EigenvalueCatalog.from_matrix(b, rr, p)
    return cat
