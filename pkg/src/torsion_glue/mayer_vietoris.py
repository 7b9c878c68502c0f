"""The limiting-value Mayer-Vietoris sequence and its torsion.

Degree convention: for p = 0..n the spaces L^p_{1,bd}, L_1^p ∩ L_2^p and
L^p_{2,bd} sit in complex degrees 3p, 3p+1 and 3p+2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complexes import FiniteComplex, NotExactError, is_exact, log_torsion
from .hermitian import HermitianSpace, complement, det_star, intersection, log_det_star, projector
from .scattering import (InvariantError, LimitingSubspace, _same_model, c12_matrix, chi_prime_of, chi_prime_top)


@dataclass
class LSequence:
    complex: FiniteComplex
    bases: list[np.ndarray] = field(repr=False)
    a: list[int]
    b: list[int]
    d: list[int]

    @property
    def dims(self) -> list[int]:
        return self.complex.dims


def _embed(b: np.ndarray, top: int, bottom: int) -> np.ndarray:
    return np.vstack([np.zeros((top, b.shape[1])), b, np.zeros((bottom, b.shape[1]))])


def _rank(m: np.ndarray) -> int:
    from .hermitian import numerical_rank

    return numerical_rank(m)


def build_l_sequence(L1: LimitingSubspace, L2: LimitingSubspace) -> LSequence:
    _same_model(L1, L2)
    y = L1.ymodel
    bases, maps = [], []
    for p in y.degrees:
        h, hm = y.betti(p), y.betti(p - 1)
        rr = _embed(intersection(L1.rel_bases[p], L2.rel_bases[p]), h, 0)
        aa = _embed(intersection(L1.abs_bases[p], L2.abs_bases[p]), 0, hm)
        b1 = L1.rel_in_block(p)
        bi = np.hstack([aa, rr])
        b2 = L2.abs_in_block(p)
        alpha = bi.conj().T @ projector(rr) @ b1 if rr.shape[1] else np.zeros((bi.shape[1], b1.shape[1]))
        beta = b2.conj().T @ projector(aa) @ bi if aa.shape[1] else np.zeros((b2.shape[1], bi.shape[1]))
        bases += [b1, bi, b2]
        maps += [alpha, beta]
        if p < y.top_degree:
            # du maps H^p (degree p) onto H^p du (degree p+1).
            hn = y.betti(p + 1)
            du_b2 = _embed(L2.abs_bases[p], hn, 0)
            # Orthogonal complement of L1rel ∩ L2rel inside L1rel (= ker alpha_{p+1}).
            rel1 = L1.rel_bases[p + 1]
            common = intersection(rel1, L2.rel_bases[p + 1])
            target = rel1 @ complement(rel1.conj().T @ common, rel1.shape[1]) if rel1.shape[1] else rel1
            q = projector(_embed(target, hn, 0)) if target.shape[1] else np.zeros((hn + h, hn + h))
            maps.append(L1.rel_in_block(p + 1).conj().T @ q @ du_b2)
    spaces = tuple(HermitianSpace.standard(b.shape[1]) for b in bases)
    c = FiniteComplex(spaces, tuple(maps))
    if not is_exact(c):
        raise InvariantError("the L-sequence is not exact; the splitting data is inconsistent")
    n = y.top_degree
    a = [_rank(maps[3 * p]) for p in y.degrees]
    b = [_rank(maps[3 * p + 1]) for p in y.degrees]
    d = [_rank(maps[3 * p + 2]) if p < n else 0 for p in y.degrees]
    return LSequence(c, bases, a, b, d)


def torsion_l(seq: LSequence) -> float:
    return float(np.exp(log_torsion(seq.complex)))


@dataclass
class ClosedFormTL:
    sign_form: float
    c12_form: float
    sign_form_literal: float


def sign_log_detstar(L1: LimitingSubspace, L2: LimitingSubspace) -> list[float]:
    """log I_{p,abs} = (1/4) log det*((2 - S1 S2 - S2 S1)/4) for p = 0..n-1."""
    out = []
    for p in range(L1.ymodel.top_degree):
        s1, s2 = L1.sign_operator(p), L2.sign_operator(p)
        m = (2 * np.eye(len(s1)) - s1 @ s2 - s2 @ s1) / 4
        out.append(0.25 * log_det_star(m) if len(s1) else 0.0)
    return out


def torsion_l_closed_form(L1: LimitingSubspace, L2: LimitingSubspace, both: bool = False, tol: float = 1e-9):
    """T_L from the C12 blocks, cross-checked against the sign operators S_j^p.

    Since C12^p = diag(S2^p S1^p, S2^{p-1} S1^{p-1}), the C12 block determinant
    in degree p is I_{p,abs} I_{p-1,abs}, so the sign-operator product carries
    the exponent (-1)^(p+1).  ``sign_form_literal`` uses (-1)^p and equals 1/T_L.
    """
    _same_model(L1, L2)
    logs = sign_log_detstar(L1, L2)
    log1 = sum((-1) ** (p + 1) * v for p, v in enumerate(logs))
    log2 = c12_log_detstar_sum(L1, L2)
    if abs(log1 - log2) > tol:
        raise InvariantError(f"the two product forms disagree: {np.exp(log1)!r} vs {np.exp(log2)!r}")
    if both:
        return ClosedFormTL(float(np.exp(log1)), float(np.exp(log2)), float(np.exp(-log1)))
    return float(np.exp(log2))


def c12_log_detstar_sum(L1: LimitingSubspace, L2: LimitingSubspace, weight: float = 0.25) -> float:
    """sum_p weight p (-1)^p log det*((2 - C12^p - (C12^p)^{-1})/4); weight 1/4 for torsion, 1/2 for zeta."""
    total = 0.0
    for p, c in enumerate(c12_matrix(L1, L2).blocks):
        if len(c):
            m = (2 * np.eye(len(c)) - c - np.linalg.inv(c)) / 4
            total += (-1) ** p * p * weight * log_det_star(0.5 * (m + m.conj().T))
    return total


def log_mv_asymptotic_rhs(L1: LimitingSubspace, L2: LimitingSubspace, R: float) -> float:
    x12 = chi_prime_of(c12_matrix(L1, L2))
    return 0.5 * x12 * np.log(2) + chi_prime_top(L1, L2) * np.log(R) + c12_log_detstar_sum(L1, L2)


def mv_asymptotic_rhs(L1: LimitingSubspace, L2: LimitingSubspace, R: float) -> float:
    """2^{chi'(C12)/2} R^{chi'} prod_p det*((2 - C12^p - C12^p^{-1})/4)^{(p/4)(-1)^p}."""
    return float(np.exp(log_mv_asymptotic_rhs(L1, L2, R)))


@dataclass(frozen=True)
class Perturbation:
    """Bounded corrections: O(1) metric terms, O(e^{-cR}) terms and O(1/R) map terms."""

    magnitude: float = 0.1
    decay: float = 1.0
    seed: int = 0


class ScaledDiagram:
    """Finite model of the middle row of the three-row diagram at stretch R.

    Each middle-row space is K ⊕ L, where K holds the L^2 harmonic part
    (standard metric) and L the limiting-value part.  The Gram matrix is
    ``[[I, C], [C^H, C^H C + S]] + s R (0 ⊕ I)`` with s = 2 for the glued
    space and 1 otherwise; C and S model the R-independent norm on the
    compact piece (scaled by ``compact_scale``).  Maps are the direct sum of
    the first row and the leading third row (alpha/2, beta, delta/R),
    conjugated by a block-unipotent change of splitting.
    """

    def __init__(self, L1: LimitingSubspace, L2: LimitingSubspace, R: float, l2_dims=None,
                 compact_scale: float = 1.0, seed: int = 0, perturbation: Perturbation | None = None):
        if R < 1:
            raise ValueError("the scaled diagram needs R >= 1")
        self.L1, self.L2, self.R = L1, L2, float(R)
        self.seq = build_l_sequence(L1, L2)
        y = L1.ymodel
        self.l2_dims = [(0, 0)] * (y.top_degree + 1) if l2_dims is None else [tuple(map(int, x)) for x in l2_dims]
        if len(self.l2_dims) != y.top_degree + 1:
            raise ValueError("l2_dims needs one (k1, k2) pair per degree")
        self.compact_scale = float(compact_scale)
        self.seed = int(seed)
        self.perturbation = perturbation

    def k_dims(self) -> list[int]:
        out = []
        for k1, k2 in self.l2_dims:
            out += [k1, k1 + k2, k2]
        return out

    def first_row_maps(self) -> list[np.ndarray]:
        maps = []
        nd = len(self.l2_dims)
        for p, (k1, k2) in enumerate(self.l2_dims):
            maps.append(np.vstack([np.eye(k1), np.zeros((k2, k1))]))
            maps.append(np.hstack([np.zeros((k2, k1)), np.eye(k2)]))
            if p + 1 < nd:
                maps.append(np.zeros((self.l2_dims[p + 1][0], k2)))
        return maps

    def third_row_maps(self) -> list[np.ndarray]:
        maps = []
        for j, m in enumerate(self.seq.complex.maps):
            scale = (0.5, 1.0, 1.0 / self.R)[j % 3]
            maps.append(scale * m)
        return maps

    def _gauss(self, rng, *shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    def middle_row(self) -> FiniteComplex:
        rng = np.random.default_rng(self.seed)
        kd, ld = self.k_dims(), self.seq.dims
        npos = len(ld)
        c = self.compact_scale
        row1, row3 = self.first_row_maps(), self.third_row_maps()
        pert = self.perturbation
        prng = np.random.default_rng(pert.seed) if pert else None
        if pert:
            eps = pert.magnitude
            frames = [np.eye(l) + eps * self._gauss(prng, l, l) / self.R for l in ld]
            row3 = [frames[j + 1] @ m @ np.linalg.inv(frames[j]) for j, m in enumerate(row3)]
        unip = [c * self._gauss(rng, k, l) for k, l in zip(kd, ld)]
        grams, maps = [], []
        for j in range(npos):
            k, l = kd[j], ld[j]
            coup = c * self._gauss(rng, k, l)
            bl = c * self._gauss(rng, l, l)
            s = 2.0 if j % 3 == 1 else 1.0
            g = np.block([[np.eye(k), coup], [coup.conj().T, coup.conj().T @ coup + bl @ bl.conj().T]])
            g[k:, k:] += s * self.R * np.eye(l)
            if pert:
                nl = self._gauss(prng, l, l)
                g[k:, k:] += pert.magnitude * nl @ nl.conj().T
                w = self._gauss(prng, k + l, k + l)
                g += pert.magnitude * np.exp(-pert.decay * self.R) * (w @ w.conj().T)
            grams.append(0.5 * (g + g.conj().T))
        for j in range(npos - 1):
            k0, l0, k1, l1 = kd[j], ld[j], kd[j + 1], ld[j + 1]
            m = np.zeros((k1 + l1, k0 + l0), dtype=complex)
            m[:k1, :k0] = row1[j]
            m[k1:, k0:] = row3[j]
            g_src = np.block([[np.eye(k0), unip[j]], [np.zeros((l0, k0)), np.eye(l0)]])
            g_dst = np.block([[np.eye(k1), unip[j + 1]], [np.zeros((l1, k1)), np.eye(l1)]])
            maps.append(g_dst @ m @ np.linalg.inv(g_src))
        spaces = tuple(HermitianSpace(kd[j] + ld[j], grams[j]) for j in range(npos))
        return FiniteComplex(spaces, tuple(maps))


def log_mv_torsion_scaled(d: ScaledDiagram) -> float:
    row = d.middle_row()
    try:
        return log_torsion(row, method="singular")
    except NotExactError as exc:
        raise InvariantError(f"synthetic middle row is not exact: {exc}") from exc


def mv_torsion_scaled(d: ScaledDiagram) -> float:
    """Brute-force torsion of the middle row."""
    return float(np.exp(log_mv_torsion_scaled(d)))


def scaled_error(L1, L2, R: float, **kw) -> float:
    """|T_R / RHS - 1| for a scaled diagram built with keyword options ``kw``."""
    d = ScaledDiagram(L1, L2, R, **kw)
    return abs(np.expm1(log_mv_torsion_scaled(d) - log_mv_asymptotic_rhs(L1, L2, R)))


def euler_identity(seq: LSequence) -> int:
    """sum_p (-1)^p (dim L1bd^p - dim(L1^p ∩ L2^p) + dim L2bd^p); zero for exact sequences."""
    dims = seq.dims
    return sum((-1) ** p * (dims[3 * p] - dims[3 * p + 1] + dims[3 * p + 2]) for p in range(len(dims) // 3))


__all__ = [
    "LSequence", "build_l_sequence", "torsion_l", "torsion_l_closed_form", "mv_asymptotic_rhs",
    "ScaledDiagram", "Perturbation", "mv_torsion_scaled", "scaled_error", "euler_identity",
    "c12_log_detstar_sum", "log_mv_asymptotic_rhs", "det_star",
]
