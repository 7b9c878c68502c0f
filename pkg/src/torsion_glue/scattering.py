"""Scattering algebra on the graded space H(Y) + H(Y)du.

The degree-p block has coordinates ``[H^p | H^{p-1} du]`` of sizes
``h_p`` and ``h_{p-1}`` (with ``h_{-1} = h_n = 0``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .hermitian import (SUBSPACE_TOL, ValidationError, complement, intersection, numerical_rank, orth,
                        projector, same_subspace)


class InvariantError(ValidationError):
    """A limiting subspace or scattering matrix violates a structural invariant."""


@dataclass(frozen=True)
class YModel:
    top_degree: int
    h: tuple[int, ...]

    def __post_init__(self):
        h = tuple(int(x) for x in self.h)
        if len(h) != self.top_degree or any(x < 0 for x in h):
            raise ValidationError(f"need {self.top_degree} non-negative Betti numbers, got {h}")
        object.__setattr__(self, "h", h)

    @classmethod
    def of(cls, h: Sequence[int]) -> "YModel":
        return cls(len(h), tuple(h))

    def betti(self, p: int) -> int:
        return self.h[p] if 0 <= p < self.top_degree else 0

    def block_dim(self, p: int) -> int:
        return self.betti(p) + self.betti(p - 1)

    @property
    def degrees(self) -> range:
        return range(self.top_degree + 1)

    @property
    def total_dim(self) -> int:
        return sum(self.block_dim(p) for p in self.degrees)

    def offset(self, p: int) -> int:
        return sum(self.block_dim(q) for q in range(p))

    def grading_sign(self, p: int) -> np.ndarray:
        """+1 on H^p, -1 on H^{p-1}du."""
        return np.concatenate([np.ones(self.betti(p)), -np.ones(self.betti(p - 1))])


def chi_euler(y: YModel) -> int:
    return sum((-1) ** p * hp for p, hp in enumerate(y.h))


@dataclass(frozen=True)
class DuOperators:
    """du-wedge, interior product and Clifford action on the full graded space."""

    ymodel: YModel
    du: np.ndarray = field(init=False, repr=False)
    iu: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        y = self.ymodel
        n = y.total_dim
        du = np.zeros((n, n))
        for p in range(y.top_degree):
            hp = y.betti(p)
            src = y.offset(p)                      # H^p inside degree p
            dst = y.offset(p + 1) + y.betti(p + 1)  # H^p du inside degree p+1
            du[dst:dst + hp, src:src + hp] = np.eye(hp)
        object.__setattr__(self, "du", du)
        object.__setattr__(self, "iu", du.T.copy())

    @property
    def clifford(self) -> np.ndarray:
        return self.du - self.iu


def _empty(rows: int) -> np.ndarray:
    return np.zeros((rows, 0), dtype=complex)


class LimitingSubspace:
    """A graded subspace L^p = L^p_abs + L^p_rel of the degree-p blocks.

    ``abs_bases[p]`` spans L^p_abs in C^{h_p}; ``rel_bases[p]`` spans L^p_rel in
    C^{h_{p-1}} (the H^{p-1}du coordinates).  With ``strict`` the Lagrangian
    condition (L^p_abs)^perp = i_u L^{p+1}_rel is enforced.
    """

    def __init__(self, ymodel: YModel, abs_bases, rel_bases, strict: bool = True):
        self.ymodel = ymodel
        y = ymodel
        if len(abs_bases) != y.top_degree + 1 or len(rel_bases) != y.top_degree + 1:
            raise InvariantError("need one abs and one rel basis per degree 0..n")
        self.abs_bases = []
        self.rel_bases = []
        for p in y.degrees:
            a = _as_basis(abs_bases[p], y.betti(p), f"abs basis in degree {p}")
            r = _as_basis(rel_bases[p], y.betti(p - 1), f"rel basis in degree {p}")
            self.abs_bases.append(orth(a))
            self.rel_bases.append(orth(r))
        self.is_lagrangian = all(
            same_subspace(complement(self.abs_bases[p], y.betti(p)), self.rel_bases[p + 1])
            for p in range(y.top_degree))
        if strict and not self.is_lagrangian:
            raise InvariantError("(L^p_abs)^perp != i_u L^{p+1}_rel")

    @classmethod
    def from_abs(cls, ymodel: YModel, abs_bases) -> "LimitingSubspace":
        """The Lagrangian subspace with prescribed absolute parts, p = 0..n-1."""
        y = ymodel
        abs_full = [orth(_as_basis(abs_bases[p], y.betti(p), f"abs basis in degree {p}"))
                    for p in range(y.top_degree)] + [_empty(0)]
        rel = [_empty(0)] + [complement(abs_full[p], y.betti(p)) for p in range(y.top_degree)]
        return cls(ymodel, abs_full, rel)

    @classmethod
    def whole(cls, ymodel: YModel) -> "LimitingSubspace":
        y = ymodel
        return cls(y, [np.eye(y.betti(p)) for p in y.degrees], [np.eye(y.betti(p - 1)) for p in y.degrees],
                   strict=False)

    @classmethod
    def zero(cls, ymodel: YModel) -> "LimitingSubspace":
        y = ymodel
        return cls(y, [_empty(y.betti(p)) for p in y.degrees], [_empty(y.betti(p - 1)) for p in y.degrees],
                   strict=False)

    def abs_dim(self, p: int) -> int:
        return self.abs_bases[p].shape[1]

    def rel_dim(self, p: int) -> int:
        return self.rel_bases[p].shape[1]

    def basis(self, p: int) -> np.ndarray:
        """Orthonormal basis of L^p in degree-p block coordinates."""
        return sla.block_diag(self.abs_bases[p], self.rel_bases[p]) if self.ymodel.block_dim(p) else _empty(0)

    def abs_in_block(self, p: int) -> np.ndarray:
        y = self.ymodel
        return np.vstack([self.abs_bases[p], np.zeros((y.betti(p - 1), self.abs_dim(p)))])

    def rel_in_block(self, p: int) -> np.ndarray:
        y = self.ymodel
        return np.vstack([np.zeros((y.betti(p), self.rel_dim(p))), self.rel_bases[p]])

    def sign_operator(self, p: int) -> np.ndarray:
        """S^p = Id on L^p_abs, -Id on its complement in H^p."""
        return 2 * projector(self.abs_bases[p]) - np.eye(self.ymodel.betti(p)) if self.ymodel.betti(p) else \
            np.zeros((0, 0))

    def dims(self) -> list[int]:
        return [self.abs_dim(p) + self.rel_dim(p) for p in self.ymodel.degrees]


def _as_basis(b, rows: int, what: str) -> np.ndarray:
    m = np.asarray(b, dtype=complex)
    if m.size == 0:
        return _empty(rows)
    if m.ndim == 1:
        m = m[:, None]
    if m.shape[0] != rows:
        raise InvariantError(f"{what} has {m.shape[0]} rows, expected {rows}")
    return m


def random_limiting_subspace(ymodel: YModel, rng: np.random.Generator, dims=None, seed_basis=None,
                             shared=None) -> LimitingSubspace:
    """Lagrangian subspace from orthonormalized Gaussian absolute parts.

    ``shared[p]`` columns (if given) are forced into L^p_abs to create
    non-generic intersections with another subspace.
    """
    abs_bases = []
    for p in range(ymodel.top_degree):
        hp = ymodel.betti(p)
        x = int(rng.integers(0, hp + 1)) if dims is None else int(dims[p])
        g = rng.standard_normal((hp, x)) + 1j * rng.standard_normal((hp, x))
        if shared is not None and shared[p] is not None and np.size(shared[p]):
            s = np.asarray(shared[p])
            g = np.hstack([s, g])[:, : max(x, s.shape[1])]
        abs_bases.append(g)
    return LimitingSubspace.from_abs(ymodel, abs_bases)


def random_pair(ymodel: YModel, rng: np.random.Generator, overlap: float = 0.5):
    """Two random Lagrangian subspaces, sharing directions with probability ``overlap``."""
    l1 = random_limiting_subspace(ymodel, rng)
    shared = []
    for p in range(ymodel.top_degree):
        choice = rng.random()
        a1, c1 = l1.abs_bases[p], complement(l1.abs_bases[p], ymodel.betti(p))
        if choice < overlap / 2 and a1.shape[1]:
            k = int(rng.integers(1, a1.shape[1] + 1))
            shared.append(a1[:, :k])
        elif choice < overlap and c1.shape[1]:
            k = int(rng.integers(1, c1.shape[1] + 1))
            shared.append(c1[:, :k])
        else:
            shared.append(None)
    l2 = random_limiting_subspace(ymodel, rng, shared=shared)
    return l1, l2


class ScatteringMatrix:
    """Per-degree blocks C^p acting on the degree-p coordinates."""

    def __init__(self, ymodel: YModel, blocks, check: bool = True):
        self.ymodel = ymodel
        self.blocks = [np.asarray(b, dtype=complex).reshape(ymodel.block_dim(p), ymodel.block_dim(p))
                       for p, b in zip(ymodel.degrees, blocks)]
        if len(self.blocks) != ymodel.top_degree + 1:
            raise ValidationError("need one block per degree")
        if check:
            self.check_grading()

    @property
    def full(self) -> np.ndarray:
        return sla.block_diag(*self.blocks) if self.ymodel.total_dim else np.zeros((0, 0))

    def check_grading(self, tol: float = 1e-10) -> None:
        y = self.ymodel
        for p, c in enumerate(self.blocks):
            h = y.betti(p)
            off = max(np.max(np.abs(c[:h, h:]), initial=0.0), np.max(np.abs(c[h:, :h]), initial=0.0))
            if off > tol:
                raise InvariantError(f"block {p} mixes H^p and H^(p-1)du (max entry {off:.2e})")

    def unitarity_defect(self) -> float:
        return max((float(np.max(np.abs(c.conj().T @ c - np.eye(len(c))), initial=0.0)) for c in self.blocks),
                   default=0.0)

    def involution_defect(self) -> float:
        return max((float(np.max(np.abs(c @ c - np.eye(len(c))), initial=0.0)) for c in self.blocks), default=0.0)

    def clifford_defect(self) -> float:
        c = self.full
        cl = DuOperators(self.ymodel).clifford
        return float(np.max(np.abs(c @ cl + cl @ c), initial=0.0))

    def inverse(self) -> "ScatteringMatrix":
        return ScatteringMatrix(self.ymodel, [np.linalg.inv(c) for c in self.blocks], check=False)

    def __matmul__(self, other: "ScatteringMatrix") -> "ScatteringMatrix":
        return ScatteringMatrix(self.ymodel, [a @ b for a, b in zip(self.blocks, other.blocks)], check=False)


def scattering_from_subspace(L: LimitingSubspace) -> ScatteringMatrix:
    """C = 2 P_L - 1."""
    y = L.ymodel
    return ScatteringMatrix(y, [2 * projector(L.basis(p)) - np.eye(y.block_dim(p)) for p in y.degrees])


def limiting_from_scattering(C: ScatteringMatrix, tol: float = 1e-10) -> LimitingSubspace:
    """L = ker(C - 1) for an involutive C."""
    if C.involution_defect() > tol:
        raise InvariantError(f"C is not involutive (defect {C.involution_defect():.2e})")
    y = C.ymodel
    abs_b, rel_b = [], []
    for p, c in enumerate(C.blocks):
        h = y.betti(p)
        abs_b.append(_fixed_space(c[:h, :h]))
        rel_b.append(_fixed_space(c[h:, h:]))
    return LimitingSubspace(y, abs_b, rel_b, strict=False)


def _fixed_space(c: np.ndarray) -> np.ndarray:
    n = len(c)
    if n == 0:
        return _empty(0)
    _, s, vh = np.linalg.svd(c - np.eye(n))
    return vh[s <= SUBSPACE_TOL].conj().T


def c_bd(C: ScatteringMatrix, side: int) -> ScatteringMatrix:
    """(-1)^side (C on H minus C on H du)."""
    if side not in (1, 2):
        raise ValueError("side must be 1 or 2")
    C.check_grading()
    y = C.ymodel
    return ScatteringMatrix(y, [(-1) ** side * c * y.grading_sign(p)[None, :] for p, c in enumerate(C.blocks)])


def kernel_dim(m: np.ndarray) -> int:
    return len(m) - numerical_rank(m - np.eye(len(m))) if len(m) else 0


def chi_prime_of(C: ScatteringMatrix) -> int:
    return sum((-1) ** p * p * kernel_dim(c) for p, c in enumerate(C.blocks))


def c12_matrix(L1: LimitingSubspace, L2: LimitingSubspace) -> ScatteringMatrix:
    """C12 at lambda = 0 for constant involutive C1, C2: C2^{-1} C1 = C2 C1."""
    _same_model(L1, L2)
    c1, c2 = scattering_from_subspace(L1), scattering_from_subspace(L2)
    return c2.inverse() @ c1


def _same_model(L1: LimitingSubspace, L2: LimitingSubspace) -> None:
    if L1.ymodel != L2.ymodel:
        raise ValidationError("limiting subspaces live on different Y models")


@dataclass
class ChiPrimeReport:
    chi_prime: int
    chi_c12: int
    chi_bd1: int
    chi_bd2: int
    image_route: int | None


def chi_prime_top(L1: LimitingSubspace, L2: LimitingSubspace, report: bool = False):
    """chi' = (chi'(C12) - chi'(C1,bd) - chi'(C2,bd)) / 2, cross-checked by sum (-1)^p d_p."""
    _same_model(L1, L2)
    c1, c2 = scattering_from_subspace(L1), scattering_from_subspace(L2)
    x12 = chi_prime_of(c12_matrix(L1, L2))
    x1 = chi_prime_of(c_bd(c1, 1))
    x2 = chi_prime_of(c_bd(c2, 2))
    diff = x12 - x1 - x2
    if diff % 2:
        raise InvariantError(f"chi'(C12) - chi'(C1bd) - chi'(C2bd) = {diff} is odd")
    value = diff // 2
    alt = None
    if L1.is_lagrangian and L2.is_lagrangian:
        from .mayer_vietoris import build_l_sequence

        seq = build_l_sequence(L1, L2)
        alt = sum((-1) ** p * d for p, d in enumerate(seq.d))
        if alt != value:
            raise InvariantError(f"boundary-difference route gives {value}, image-dimension route gives {alt}")
    if report:
        return ChiPrimeReport(value, x12, x1, x2, alt)
    return value


def dimension_bookkeeping(L1: LimitingSubspace, L2: LimitingSubspace) -> list[tuple[int, int, int, int, int]]:
    """Per degree p < n: (h_p, x_p, y_p, u_p, v_p) with u = dim of abs intersection,
    v = dim of the intersection of the abs complements."""
    y = L1.ymodel
    rows = []
    for p in range(y.top_degree):
        hp = y.betti(p)
        a1, a2 = L1.abs_bases[p], L2.abs_bases[p]
        u = intersection(a1, a2).shape[1]
        v = intersection(complement(a1, hp), complement(a2, hp)).shape[1]
        rows.append((hp, a1.shape[1], a2.shape[1], u, v))
    return rows


def kernel_predictions(L1: LimitingSubspace, L2: LimitingSubspace, p: int) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """(computed kernel, predicted subspace) pairs for the boundary and glued matrices in degree p."""
    y = L1.ymodel
    h, hm = y.betti(p), y.betti(p - 1)

    def in_h(b):
        return np.vstack([b, np.zeros((hm, b.shape[1]))])

    def in_hdu(b):
        return np.vstack([np.zeros((h, b.shape[1])), b])

    def kernel(m):
        return _fixed_space(m)

    c1, c2 = scattering_from_subspace(L1), scattering_from_subspace(L2)
    nxt1 = L1.rel_bases[p + 1] if p + 1 <= y.top_degree else _empty(h)
    nxt2 = L2.rel_bases[p + 1] if p + 1 <= y.top_degree else _empty(h)
    prev1 = L1.abs_bases[p - 1] if p >= 1 else _empty(0)
    prev2 = L2.abs_bases[p - 1] if p >= 1 else _empty(0)
    pred1 = np.hstack([in_hdu(L1.rel_bases[p]), in_h(nxt1)])
    pred2 = np.hstack([in_h(L2.abs_bases[p]), in_hdu(prev2)])
    pred12 = np.hstack([
        intersection(L1.basis(p), L2.basis(p)),
        in_h(intersection(nxt1, nxt2)),
        in_hdu(intersection(prev1, prev2)),
    ])
    return {
        "C1bd": (kernel(c_bd(c1, 1).blocks[p]), pred1),
        "C2bd": (kernel(c_bd(c2, 2).blocks[p]), pred2),
        "C12": (kernel(c12_matrix(L1, L2).blocks[p]), pred12),
    }


# Families C(lambda).


def polar_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


class ScatteringFamily:
    """A matrix family C(lambda) on a validity interval (-radius, radius).

    ``form="series"``: C(lambda) is the unitary polar factor of sum_k C_k lambda^k.
    ``form="exponential"``: C(lambda) = C_0 expm(i sum_{k>=1} H_k lambda^k), H_k Hermitian.
    """

    def __init__(self, coefficients, radius: float = np.inf, form: str = "series",
                 func: Callable[[float], np.ndarray] | None = None, ymodel: YModel | None = None):
        self.coefficients = [np.asarray(c, dtype=complex) for c in coefficients]
        if not self.coefficients:
            raise ValidationError("a family needs at least C_0")
        m = self.coefficients[0].shape
        if any(c.shape != m or len(m) != 2 or m[0] != m[1] for c in self.coefficients):
            raise ValidationError("coefficients must be square matrices of one shape")
        if form not in ("series", "exponential", "composite"):
            raise ValueError(f"unknown form {form!r}")
        if form == "exponential":
            for k, hk in enumerate(self.coefficients[1:], start=1):
                if np.max(np.abs(hk - hk.conj().T), initial=0.0) > 1e-12:
                    raise ValidationError(f"generator H_{k} is not Hermitian")
        self.radius = float(radius)
        self.form = form
        self.ymodel = ymodel
        self._func = func
        self._eig = None
        if form == "exponential" and self.degree == 1:
            h1 = self.coefficients[1]
            w, v = np.linalg.eigh(0.5 * (h1 + h1.conj().T))
            self._eig = (w, self.coefficients[0] @ v, v.conj().T)

    @classmethod
    def constant(cls, c, ymodel: YModel | None = None) -> "ScatteringFamily":
        if isinstance(c, ScatteringMatrix):
            ymodel, c = c.ymodel, c.full
        return cls([c], ymodel=ymodel)

    @classmethod
    def phase_linear(cls, c0, rate: float, radius: float = np.inf) -> "ScatteringFamily":
        """C(lambda) = exp(i rate lambda) C_0: every eigenphase moves linearly."""
        c0 = np.asarray(c0, dtype=complex)
        return cls([c0, rate * np.eye(len(c0))], radius=radius, form="exponential")

    @property
    def dim(self) -> int:
        return self.coefficients[0].shape[0]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_constant(self) -> bool:
        return self.form != "composite" and all(np.max(np.abs(c), initial=0.0) == 0 for c in self.coefficients[1:])

    def raw_series(self, lam: float) -> np.ndarray:
        return sum(c * lam**k for k, c in enumerate(self.coefficients))

    def __call__(self, lam: float) -> np.ndarray:
        if self._func is not None:
            return self._func(lam)
        if self.form == "series":
            return polar_unitary(self.raw_series(lam)) if self.degree else self.coefficients[0]
        if self._eig is not None:
            w, left, right = self._eig
            return (left * np.exp(1j * lam * w)) @ right
        gen = sum(h * lam**k for k, h in enumerate(self.coefficients[1:], start=1)) if self.degree else 0
        return self.coefficients[0] @ sla.expm(1j * gen) if self.degree else self.coefficients[0]

    def at0(self) -> np.ndarray:
        return self(0.0)

    def frozen(self) -> "ScatteringFamily":
        return ScatteringFamily([self.at0()], radius=self.radius, ymodel=self.ymodel)

    def _grid(self, n: int = 33) -> np.ndarray:
        r = min(self.radius, 1.0)
        return np.linspace(-0.999 * r, 0.999 * r, n)

    def unitarity_defect(self) -> float:
        return max(float(np.max(np.abs(c.conj().T @ c - np.eye(self.dim)))) for c in map(self, self._grid()))

    def reciprocity_defect(self) -> float:
        """max |C(l) C(-l) - 1| on a grid (zero for single-manifold matrices)."""
        return max(float(np.max(np.abs(self(l) @ self(-l) - np.eye(self.dim)))) for l in self._grid())


def _series_inverse(coeffs: list[np.ndarray], degree: int) -> list[np.ndarray]:
    b0 = np.linalg.inv(coeffs[0])
    out = [b0]
    for k in range(1, degree + 1):
        acc = sum(coeffs[i] @ out[k - i] for i in range(1, min(k, len(coeffs) - 1) + 1))
        out.append(-b0 @ acc)
    return out


def c12(C1: ScatteringFamily, C2: ScatteringFamily) -> ScatteringFamily:
    """C12(lambda) = C2(lambda)^{-1} C1(lambda)."""
    if C1.dim != C2.dim:
        raise ValidationError("families act on spaces of different dimension")
    radius = min(C1.radius, C2.radius)
    if C1.form == C2.form == "series":
        d = max(C1.degree, C2.degree)
        inv = _series_inverse(C2.coefficients, d)
        a = C1.coefficients + [np.zeros_like(C1.coefficients[0])] * (d - C1.degree)
        prod = [sum(inv[i] @ a[k - i] for i in range(k + 1)) for k in range(d + 1)]
        return ScatteringFamily(prod, radius=radius, ymodel=C1.ymodel)

    def func(lam):
        return np.linalg.solve(C2(lam), C1(lam))

    return ScatteringFamily([func(0.0)], radius=radius, form="composite", func=func, ymodel=C1.ymodel)


def degree_block_family(F: ScatteringFamily, p: int) -> ScatteringFamily:
    """Restriction of a full-space family to the degree-p block."""
    y = F.ymodel
    if y is None:
        raise ValidationError("family carries no Y model")
    lo, hi = y.offset(p), y.offset(p) + y.block_dim(p)
    return ScatteringFamily([F.at0()[lo:hi, lo:hi]], radius=F.radius, form="composite",
                            func=lambda lam: F(lam)[lo:hi, lo:hi])
