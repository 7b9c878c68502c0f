"""Finite metrized cochain complexes and their torsion."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .hermitian import HermitianSpace, ValidationError, numerical_rank, zero_cutoff


def _opnorm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


class NotExactError(ValueError):
    def __init__(self, degree: int, detail: str = ""):
        self.degree = degree
        super().__init__(f"complex is not exact at degree {degree}{': ' + detail if detail else ''}")


@dataclass(frozen=True)
class FiniteComplex:
    """V^0 -> V^1 -> ... -> V^n with maps[j]: V^j -> V^{j+1} (shape dim_{j+1} x dim_j)."""

    spaces: tuple[HermitianSpace, ...]
    maps: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        spaces = tuple(self.spaces)
        if len(spaces) == 0:
            raise ValidationError("a complex needs at least one space")
        maps = []
        for j in range(len(spaces) - 1):
            src, dst = spaces[j].dim, spaces[j + 1].dim
            if j < len(self.maps):
                a = np.asarray(self.maps[j], dtype=complex)
                if a.size == 0:
                    a = np.zeros((dst, src), dtype=complex)
            else:
                a = np.zeros((dst, src), dtype=complex)
            if a.shape != (dst, src):
                raise ValidationError(f"map {j} has shape {a.shape}, expected {(dst, src)}")
            maps.append(a)
        if len(self.maps) > len(maps):
            raise ValidationError("more maps than gaps between spaces")
        for j in range(len(maps) - 1):
            comp = maps[j + 1] @ maps[j]
            if comp.size:
                scale = max(1.0, _opnorm(maps[j + 1]) * _opnorm(maps[j]))
                if np.max(np.abs(comp)) > 1e-10 * scale:
                    raise ValidationError(f"d_{j + 1} o d_{j} != 0")
        object.__setattr__(self, "spaces", spaces)
        object.__setattr__(self, "maps", tuple(maps))

    @classmethod
    def from_maps(cls, maps, dims=None, grams=None) -> "FiniteComplex":
        """Build from maps alone (dims inferred) with optional Gram matrices."""
        maps = [np.atleast_2d(np.asarray(m, dtype=complex)) for m in maps]
        if dims is None:
            dims = [maps[0].shape[1]] + [m.shape[0] for m in maps]
        if grams is None:
            spaces = [HermitianSpace.standard(d) for d in dims]
        else:
            spaces = [HermitianSpace(d, g) for d, g in zip(dims, grams)]
        return cls(tuple(spaces), tuple(maps))

    @property
    def length(self) -> int:
        return len(self.spaces) - 1

    @property
    def dims(self) -> list[int]:
        return [v.dim for v in self.spaces]

    def orthonormal_maps(self) -> list[np.ndarray]:
        """Differentials written in gram-orthonormal bases."""
        out = []
        for j, a in enumerate(self.maps):
            lh_dst = self.spaces[j + 1].chol.conj().T
            lh_src = self.spaces[j].chol.conj().T
            if a.size == 0:
                out.append(a)
                continue
            out.append(lh_dst @ sla.solve_triangular(lh_src.T, a.T, lower=True).T)
        return out

    def ranks(self) -> list[int]:
        return [numerical_rank(a) for a in self.orthonormal_maps()]


def _failing_degree(c: FiniteComplex) -> int | None:
    r = [0] + c.ranks() + [0]
    for j, d in enumerate(c.dims):
        if r[j] + r[j + 1] != d:
            return j
    return None


def is_exact(c: FiniteComplex) -> bool:
    return _failing_degree(c) is None


def _require_exact(c: FiniteComplex) -> None:
    j = _failing_degree(c)
    if j is not None:
        raise NotExactError(j)


def log_torsion(c: FiniteComplex, method: str = "singular") -> float:
    """log of prod_j det(Laplacian_j)^((-1)^j j/2).

    The default ``method="singular"`` evaluates the equivalent form
    sum_j (-1)^(j+1) log prod sigma(d_j), which avoids squaring condition
    numbers; ``method="laplacian"`` forms the Laplacians explicitly.
    """
    _require_exact(c)
    maps = c.orthonormal_maps()
    if method == "singular":
        total = 0.0
        for j, a in enumerate(maps):
            if a.size:
                s = np.linalg.svd(a, compute_uv=False)
                total += (-1) ** (j + 1) * float(np.sum(np.log(s[s > zero_cutoff(s)])))
        return total
    if method != "laplacian":
        raise ValueError(f"unknown method {method!r}")
    total = 0.0
    for j, d in enumerate(c.dims):
        if d == 0 or j == 0:
            continue
        lap = np.zeros((d, d), dtype=complex)
        if j > 0:
            lap += maps[j - 1] @ maps[j - 1].conj().T
        if j < len(maps):
            lap += maps[j].conj().T @ maps[j]
        w = np.linalg.eigvalsh(0.5 * (lap + lap.conj().T))
        total += (-1) ** j * 0.5 * j * float(np.sum(np.log(w)))
    return total


def torsion(c: FiniteComplex, method: str = "singular") -> float:
    return float(np.exp(log_torsion(c, method)))


def canonical_lifts(c: FiniteComplex) -> list[np.ndarray]:
    """Gram-orthonormal bases s_j of the complement of Im(d_{j-1}) in V^j."""
    lifts = []
    for j, v in enumerate(c.spaces):
        lh = v.chol.conj().T
        if j == 0 or c.maps[j - 1].size == 0:
            img = np.zeros((v.dim, 0), dtype=complex)
        else:
            img = lh @ c.maps[j - 1]
        if v.dim == 0:
            lifts.append(np.zeros((0, 0), dtype=complex))
            continue
        u, s, _ = np.linalg.svd(img, full_matrices=True) if img.shape[1] else (np.eye(v.dim), np.zeros(0), None)
        r = int(np.sum(s > zero_cutoff(s))) if len(s) else 0
        lifts.append(sla.solve_triangular(lh, u[:, r:], lower=False))
    return lifts


def log_canonical_section_norm(c: FiniteComplex) -> float:
    """log of the norm of the canonical section of det V, from Gram determinants."""
    _require_exact(c)
    lifts = canonical_lifts(c)
    total = 0.0
    for j, v in enumerate(c.spaces):
        if v.dim == 0:
            continue
        cols = [lifts[j]]
        if j > 0:
            cols.insert(0, c.maps[j - 1] @ lifts[j - 1])
        w = np.hstack(cols)
        if w.shape[1] != v.dim:
            raise NotExactError(j, "lifts do not form a basis")
        sign, logdet = np.linalg.slogdet(w.conj().T @ v.gram @ w)
        total += (-1) ** j * 0.5 * float(logdet)
    return total


def canonical_section_norm(c: FiniteComplex) -> float:
    return float(np.exp(log_canonical_section_norm(c)))


def shift(c: FiniteComplex, n: int) -> FiniteComplex:
    """Right shift: V[n]^k = V^{k-n}, padding with zero spaces."""
    if n < 0:
        raise ValueError("shift amount must be non-negative")
    zeros = tuple(HermitianSpace.standard(0) for _ in range(n))
    pad = tuple(np.zeros((0 if k < n - 1 else c.spaces[0].dim, 0), dtype=complex) for k in range(n))
    return FiniteComplex(zeros + c.spaces, pad + c.maps)


def _padded(c: FiniteComplex, length: int) -> FiniteComplex:
    extra = length - c.length
    if extra <= 0:
        return c
    spaces = c.spaces + tuple(HermitianSpace.standard(0) for _ in range(extra))
    maps = c.maps + (np.zeros((0, c.spaces[-1].dim), dtype=complex),) + tuple(
        np.zeros((0, 0), dtype=complex) for _ in range(extra - 1))
    return FiniteComplex(spaces, maps)


def direct_sum(c1: FiniteComplex, c2: FiniteComplex) -> FiniteComplex:
    n = max(c1.length, c2.length)
    a, b = _padded(c1, n), _padded(c2, n)
    spaces = tuple(HermitianSpace(x.dim + y.dim, sla.block_diag(x.gram, y.gram)) for x, y in zip(a.spaces, b.spaces))
    maps = tuple(sla.block_diag(x, y) if (x.size or y.size) else np.zeros(
        (s2.dim, s1.dim), dtype=complex) for x, y, s1, s2 in zip(a.maps, b.maps, spaces[:-1], spaces[1:]))
    return FiniteComplex(spaces, maps)


def short_sequence(a, grams=(None, None), degree: int = 1) -> FiniteComplex:
    """0 -> V --a--> W -> 0 with V placed in ``degree``; torsion is |det a| at degree 1."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    g1 = np.eye(a.shape[1]) if grams[0] is None else grams[0]
    g2 = np.eye(a.shape[0]) if grams[1] is None else grams[1]
    base = FiniteComplex((HermitianSpace(a.shape[1], g1), HermitianSpace(a.shape[0], g2)), (a,))
    return shift(base, degree) if degree else base


def random_exact_complex(rng: np.random.Generator, ranks=None, metric: bool = True) -> FiniteComplex:
    """Random exact complex with rank(d_j) = ranks[j] and random Gram matrices."""
    if ranks is None:
        ranks = [int(x) for x in rng.integers(1, 4, size=int(rng.integers(1, 4)))]
    r = [0] + [int(x) for x in ranks] + [0]
    dims = [r[j] + r[j + 1] for j in range(len(r) - 1)]

    def gauss(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    frames = [gauss(d, d) + 2 * np.eye(d) for d in dims]
    maps = []
    for j in range(len(dims) - 1):
        e = np.zeros((dims[j + 1], dims[j]), dtype=complex)
        # V^j = K_j (first r_j coords, image) + C_j; C_j maps onto K_{j+1}.
        e[: r[j + 1], r[j]:] = gauss(r[j + 1], r[j + 1])
        maps.append(frames[j + 1] @ e @ np.linalg.inv(frames[j]))
    grams = None
    if metric:
        grams = []
        for d in dims:
            b = gauss(d, d)
            grams.append(b.conj().T @ b + 0.5 * np.eye(d))
    return FiniteComplex.from_maps(maps, dims=dims, grams=grams)
