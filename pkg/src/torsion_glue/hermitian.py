"""Small dense Hermitian linear algebra with explicit Gram matrices.

Every operator is expressed in a (possibly non-orthonormal) basis of a
:class:`HermitianSpace`; adjoints are taken with respect to its Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

TAU = 1e-10
TAU_FLOOR = 1e-14
SUBSPACE_TOL = 1e-8


class ValidationError(ValueError):
    """Input violates a structural invariant."""


def as_matrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        if m.size == 0 and rows is not None and cols is not None:
            return np.zeros((rows, cols), dtype=complex)
        raise ValidationError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def zero_cutoff(values: np.ndarray) -> float:
    """Threshold under which an eigen/singular value counts as zero."""
    rho = float(np.max(np.abs(values))) if len(values) else 0.0
    return max(TAU * max(1.0, rho), TAU_FLOOR)


def numerical_rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > zero_cutoff(s)))


@dataclass(frozen=True)
class HermitianSpace:
    """A complex inner-product space C^dim with Gram matrix ``gram``."""

    dim: int
    gram: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = as_matrix(self.gram, self.dim, self.dim)
        if g.shape != (self.dim, self.dim):
            raise ValidationError(f"gram has shape {g.shape}, expected {(self.dim, self.dim)}")
        asym = float(np.max(np.abs(g - g.conj().T))) if self.dim else 0.0
        if asym > 1e-12 * max(1.0, float(np.max(np.abs(g))) if self.dim else 1.0):
            raise ValidationError(f"gram is not Hermitian (max asymmetry {asym:.3e})")
        g = 0.5 * (g + g.conj().T)
        if self.dim and np.min(np.linalg.eigvalsh(g)) <= 0:
            raise ValidationError("gram is not positive definite")
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "_chol", np.linalg.cholesky(g) if self.dim else g)

    @classmethod
    def standard(cls, dim: int) -> "HermitianSpace":
        return cls(dim, np.eye(dim, dtype=complex))

    @property
    def chol(self) -> np.ndarray:
        """Lower Cholesky factor L with gram = L L^H."""
        return self._chol

    def inner(self, x, y) -> complex:
        return complex(np.conj(x) @ self.gram @ y)

    def adjoint(self, a: np.ndarray) -> np.ndarray:
        """Gram-adjoint of an endomorphism."""
        return np.linalg.solve(self.gram, a.conj().T @ self.gram) if self.dim else a

    def to_orthonormal(self, a: np.ndarray) -> np.ndarray:
        """Matrix of an endomorphism in a gram-orthonormal basis."""
        if not self.dim:
            return a
        lh = self._chol.conj().T
        return lh @ a @ np.linalg.inv(lh)

    def orthonormalize(self, basis: np.ndarray) -> np.ndarray:
        """Gram-orthonormal basis of the column span, rank-revealing."""
        b = as_matrix(basis, self.dim, 0)
        if b.shape[1] == 0:
            return np.zeros((self.dim, 0), dtype=complex)
        lh = self._chol.conj().T
        u, s, _ = np.linalg.svd(lh @ b, full_matrices=False)
        r = int(np.sum(s > zero_cutoff(s)))
        return sla.solve_triangular(lh, u[:, :r], lower=False)


def check_self_adjoint(a: np.ndarray, space: HermitianSpace) -> np.ndarray:
    """Return G·A after checking it is Hermitian (A self-adjoint w.r.t. G)."""
    a = as_matrix(a, space.dim, space.dim)
    if a.shape != (space.dim, space.dim):
        raise ValidationError(f"matrix shape {a.shape} does not match space dim {space.dim}")
    ga = space.gram @ a
    if not space.dim:
        return ga
    asym = float(np.max(np.abs(ga - ga.conj().T)))
    scale = max(1.0, float(np.max(np.abs(ga))))
    if asym > 1e-9 * scale:
        raise ValidationError(f"matrix is not self-adjoint (max asymmetry {asym:.3e})")
    return 0.5 * (ga + ga.conj().T)


def hermitian_eig(a, space: HermitianSpace | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Sorted eigenvalues and gram-orthonormal eigenvectors of a self-adjoint A."""
    a = as_matrix(a)
    space = space or HermitianSpace.standard(a.shape[0])
    ga = check_self_adjoint(a, space)
    if not space.dim:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    w, v = sla.eigh(ga, space.gram)
    return w, v


def det_star(a, space: HermitianSpace | None = None) -> float:
    """Product of the nonzero eigenvalues of a self-adjoint A (empty product 1)."""
    w, _ = hermitian_eig(a, space)
    if not len(w):
        return 1.0
    keep = w[np.abs(w) > zero_cutoff(w)]
    return float(np.prod(keep)) if len(keep) else 1.0


def log_det_star(a, space: HermitianSpace | None = None) -> float:
    """log|det*(A)|, robust for products spanning many decades."""
    w, _ = hermitian_eig(a, space)
    keep = w[np.abs(w) > zero_cutoff(w)] if len(w) else w
    return float(np.sum(np.log(np.abs(keep))))


@dataclass(frozen=True)
class OrthoProjection:
    """Gram-orthogonal projection on ``ambient``."""

    ambient: HermitianSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = as_matrix(self.matrix, self.ambient.dim, self.ambient.dim)
        if p.shape != (self.ambient.dim, self.ambient.dim):
            raise ValidationError("projection shape does not match ambient dimension")
        if self.ambient.dim:
            idem = float(np.max(np.abs(p @ p - p)))
            if idem > 1e-10:
                raise ValidationError(f"P^2 != P (max deviation {idem:.3e})")
            check_self_adjoint(p, self.ambient)
        object.__setattr__(self, "matrix", p)

    @classmethod
    def onto(cls, basis, ambient: HermitianSpace | None = None) -> "OrthoProjection":
        b = as_matrix(basis)
        ambient = ambient or HermitianSpace.standard(b.shape[0])
        q = ambient.orthonormalize(b)
        return cls(ambient, q @ q.conj().T @ ambient.gram)

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.matrix).real))

    def image_basis(self) -> np.ndarray:
        return self.ambient.orthonormalize(self.matrix)


def _same_ambient(p1: OrthoProjection, p2: OrthoProjection) -> HermitianSpace:
    if p1.ambient.dim != p2.ambient.dim or not np.allclose(p1.ambient.gram, p2.ambient.gram):
        raise ValidationError("projections live on different ambient spaces")
    return p1.ambient


def projection_pair_detstar(p1: OrthoProjection, p2: OrthoProjection) -> float:
    """det*(Id - P1 - P2 + P1P2 + P2P1)^(1/4)."""
    amb = _same_ambient(p1, p2)
    a, b = p1.matrix, p2.matrix
    m = np.eye(amb.dim) - a - b + a @ b + b @ a
    return det_star(m, amb) ** 0.25


def projection_pair_det_explicit(p1: OrthoProjection, p2: OrthoProjection) -> float:
    """|det(P1 restricted to Im(P2P1), landing in Im(P1P2))| via explicit bases."""
    amb = _same_ambient(p1, p2)
    if not amb.dim:
        return 1.0
    a = amb.to_orthonormal(p1.matrix)
    b = amb.to_orthonormal(p2.matrix)
    src = _range_basis(b @ a)
    dst = _range_basis(a @ b)
    if src.shape[1] == 0:
        return 1.0
    return float(abs(np.linalg.det(dst.conj().T @ a @ src)))


def _range_basis(m: np.ndarray) -> np.ndarray:
    u, s, _ = np.linalg.svd(m)
    return u[:, : int(np.sum(s > zero_cutoff(s)))]


# Subspaces of a standard C^n, given by column bases.


def orth(basis) -> np.ndarray:
    b = np.asarray(basis, dtype=complex)
    if b.ndim != 2 or b.shape[1] == 0:
        return np.zeros((b.shape[0] if b.ndim == 2 else 0, 0), dtype=complex)
    u, s, _ = np.linalg.svd(b, full_matrices=False)
    return u[:, : int(np.sum(s > SUBSPACE_TOL * max(1.0, s[0])))]


def complement(basis, n: int | None = None) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement in C^n."""
    b = orth(basis)
    n = b.shape[0] if n is None else n
    if b.shape[1] == 0:
        return np.eye(n, dtype=complex)
    u, _, _ = np.linalg.svd(b, full_matrices=True)
    return u[:, b.shape[1]:]


def intersection(u, v) -> np.ndarray:
    """Orthonormal basis of span(u) ∩ span(v)."""
    u, v = orth(u), orth(v)
    if u.shape[1] == 0 or v.shape[1] == 0:
        return np.zeros((u.shape[0], 0), dtype=complex)
    # Principal vectors with zero angle.
    left, s, _ = np.linalg.svd(u.conj().T @ v)
    k = len(s)
    cand = u @ left[:, :k]
    resid = cand - v @ (v.conj().T @ cand)
    sines = np.linalg.norm(resid, axis=0)
    return orth(cand[:, sines <= SUBSPACE_TOL])


def projector(basis) -> np.ndarray:
    q = orth(basis)
    return q @ q.conj().T


def max_principal_sine(u, v) -> float:
    """Largest sine of the principal angles between equal-dimensional subspaces."""
    u, v = orth(u), orth(v)
    if u.shape[1] != v.shape[1]:
        return 1.0
    if u.shape[1] == 0:
        return 0.0
    resid = v - u @ (u.conj().T @ v)
    return float(np.linalg.norm(resid, 2))


def same_subspace(u, v, tol: float = SUBSPACE_TOL) -> bool:
    return orth(u).shape[1] == orth(v).shape[1] and max_principal_sine(u, v) <= tol
