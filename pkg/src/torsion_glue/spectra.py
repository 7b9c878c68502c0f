"""Roots of det(exp(i c lambda R) C(lambda) - 1) = 0 for unitary families C.

``mode="full"`` uses the factor 4R (glued problem), ``mode="boundary"`` uses 2R.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .scattering import ScatteringFamily

TWO_PI = 2 * np.pi
PHASE_TOL = 1e-9
ZERO_ROOT_TOL = 1e-12  # roots this close to 0 are the excluded lambda = 0


class BranchAmbiguityError(RuntimeError):
    pass


class RootNotConvergedError(RuntimeError):
    def __init__(self, lo: float, hi: float):
        self.bracket = (lo, hi)
        super().__init__(f"safeguarded Newton did not converge in [{lo!r}, {hi!r}]")


class PreconditionError(ValueError):
    pass


def wrap(x):
    """Map angles to (-pi, pi]."""
    y = np.mod(np.asarray(x) + np.pi, TWO_PI) - np.pi
    return np.where(y == -np.pi, np.pi, y)


def eigenphases(c: np.ndarray) -> np.ndarray:
    return np.sort(np.angle(np.linalg.eigvals(c)))


def _factor(R: float, mode: str) -> float:
    if mode == "full":
        return 4.0 * R
    if mode == "boundary":
        return 2.0 * R
    raise ValueError(f"mode must be 'full' or 'boundary', got {mode!r}")


@dataclass
class PhaseBranches:
    grid: np.ndarray
    values: np.ndarray  # shape (m, len(grid))
    family: ScatteringFamily = field(repr=False)
    groups: list[list[int]] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def fit(self, j: int, deg: int = 8) -> np.polynomial.Polynomial:
        deg = min(deg, len(self.grid) - 1)
        return np.polynomial.Polynomial.fit(self.grid, self.values[j], deg)

    def theta(self, j: int, lam: float) -> float:
        """Continuous branch value at ``lam``, snapped to an exact eigenphase."""
        guess = float(np.interp(lam, self.grid, self.values[j]))
        ph = np.angle(np.linalg.eigvals(self.family(lam)))
        d = wrap(ph - guess)
        return guess + float(d[np.argmin(np.abs(d))])

    def dtheta(self, j: int, lam: float, h: float = 1e-6) -> float:
        return (self.theta(j, lam + h) - self.theta(j, lam - h)) / (2 * h)


def phase_branches(C: ScatteringFamily, window: tuple[float, float], grid_step: float | None = None) -> PhaseBranches:
    lo, hi = map(float, window)
    if not lo < hi:
        raise ValueError("empty window")
    if max(abs(lo), abs(hi)) >= C.radius:
        raise ValueError(f"window {window} leaves the validity radius {C.radius}")
    deg = C.degree if C.form != "composite" else 4
    step = grid_step or (hi - lo) / (64 * (deg + 1))
    n = int(np.ceil((hi - lo) / step)) + 1
    grid = np.linspace(lo, hi, n)
    # Start at the grid point nearest 0 so phases there lie in (-pi, pi].
    i0 = int(np.argmin(np.abs(grid)))
    m = C.dim
    vals = np.zeros((m, n))
    vals[:, i0] = eigenphases(C(grid[i0]))
    for direction in (1, -1):
        prev2 = None
        i = i0
        while 0 <= i + direction < n:
            prev = vals[:, i]
            pred = prev if prev2 is None else 2 * prev - prev2
            ph = np.angle(np.linalg.eigvals(C(grid[i + direction])))
            cost = np.abs(wrap(ph[None, :] - pred[:, None]))
            rows, cols = linear_sum_assignment(cost)
            new = np.empty(m)
            new[rows] = prev[rows] + wrap(ph[cols] - prev[rows])
            jump = np.max(np.abs(new - prev)) if m else 0.0
            if jump >= np.pi / 4:
                raise BranchAmbiguityError(
                    f"phase jump {jump:.3f} between grid points {grid[i]:.6g} and {grid[i + direction]:.6g}; "
                    "use a finer grid_step")
            vals[:, i + direction] = new
            prev2 = prev
            i += direction
    pb = PhaseBranches(grid, vals, C)
    pb.groups = _group_branches(vals)
    return pb


def _group_branches(vals: np.ndarray) -> list[list[int]]:
    groups: list[list[int]] = []
    for j in range(vals.shape[0]):
        for g in groups:
            if np.max(np.abs(vals[j] - vals[g[0]])) < PHASE_TOL:
                g.append(j)
                break
        else:
            groups.append([j])
    return groups


@dataclass(frozen=True)
class Root:
    lam: float
    multiplicity: int
    branch: int
    k: int
    residual: float


@dataclass
class LambdaSet:
    R: float
    window: tuple[float, float]
    mode: str
    roots: list[Root]

    @property
    def values(self) -> np.ndarray:
        return np.array([r.lam for r in self.roots])

    def with_multiplicity(self) -> np.ndarray:
        return np.repeat(self.values, [r.multiplicity for r in self.roots])


def root_residual(C: ScatteringFamily, R: float, lam: float, multiplicity: int = 1, mode: str = "full") -> float:
    """multiplicity-th smallest singular value of exp(i c R lam) C(lam) - 1."""
    m = np.exp(1j * _factor(R, mode) * lam) * C(lam) - np.eye(C.dim)
    s = np.linalg.svd(m, compute_uv=False)
    return float(np.sort(s)[multiplicity - 1])


def _constant_groups(c: np.ndarray) -> list[tuple[float, int]]:
    ph = eigenphases(c)
    ph = np.where(np.abs(ph) < PHASE_TOL, 0.0, ph)
    out: list[tuple[float, int]] = []
    for t in ph:
        if out and abs(t - out[-1][0]) < PHASE_TOL:
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((float(t), 1))
    return out


def _k_range(g_lo: float, g_hi: float) -> range:
    return range(int(np.floor(g_lo / TWO_PI)) - 1, int(np.ceil(g_hi / TWO_PI)) + 2)


def safeguarded_newton(f: Callable[[float], float], df: Callable[[float], float], lo: float, hi: float,
                       xtol: float = 1e-15, max_iter: int = 100) -> float:
    """Root of an increasing f on [lo, hi] with f(lo) <= 0 <= f(hi)."""
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise RootNotConvergedError(lo, hi)
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        d = df(x)
        step = fx / d if d > 0 else np.inf
        xn = x - step
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= xtol * max(1.0, abs(x)) or hi - lo <= xtol * max(1.0, abs(x)):
            return xn
        x = xn
    raise RootNotConvergedError(lo, hi)


def lambda_roots(C: ScatteringFamily, R: float, window: tuple[float, float], mode: str = "full",
                 grid_step: float | None = None) -> LambdaSet:
    """All roots in the open window, excluding 0, with multiplicities."""
    if R <= 0:
        raise ValueError("R must be positive")
    lo, hi = map(float, window)
    fac = _factor(R, mode)
    roots: list[Root] = []
    if C.is_constant:
        for b, (theta, mult) in enumerate(_constant_groups(C.at0())):
            for k in _k_range(fac * lo + theta, fac * hi + theta):
                lam = (TWO_PI * k - theta) / fac
                if lo < lam < hi and abs(lam) > ZERO_ROOT_TOL:
                    roots.append(Root(lam, mult, b, k, root_residual(C, R, lam, mult, mode)))
    else:
        pb = phase_branches(C, (lo, hi), grid_step)
        for b, grp in enumerate(pb.groups):
            j = grp[0]
            g = fac * pb.grid + pb.values[j]
            for k in _k_range(g.min(), g.max()):
                target = TWO_PI * k
                idx = np.nonzero((g[:-1] - target) * (g[1:] - target) <= 0)[0]
                for i in idx:
                    a, bb = pb.grid[i], pb.grid[i + 1]

                    def f(x, j=j, target=target):
                        return fac * x + pb.theta(j, x) - target

                    def df(x, j=j):
                        return fac + pb.dtheta(j, x)

                    if f(a) > 0 or f(bb) < 0:
                        continue
                    lam = safeguarded_newton(f, df, a, bb)
                    if lo < lam < hi and abs(lam) > ZERO_ROOT_TOL and not any(
                            r.branch == b and abs(r.lam - lam) < 1e-12 for r in roots):
                        roots.append(Root(lam, len(grp), b, k, root_residual(C, R, lam, len(grp), mode)))
    roots.sort(key=lambda r: (r.lam, r.branch))
    return LambdaSet(float(R), (lo, hi), mode, roots)


@dataclass
class RefinedRoot:
    z: float
    w: np.ndarray
    branch_phase: float
    multiplicity: int
    trivial: bool
    bound_z: tuple[float, float]      # (|z_j - z0|^2, ||v||^-1 res)
    bound_w: tuple[float, float]      # (||P_j(z0) v - w_j||^2, ||v|| res)
    fixed_point_residual: float

    @property
    def bounds_hold(self) -> bool:
        return self.bound_z[0] <= self.bound_z[1] and self.bound_w[0] <= self.bound_w[1]


def _spectral_projection(c: np.ndarray, phase: float, mult: int) -> tuple[np.ndarray, float]:
    """Orthogonal projection onto the ``mult`` eigenvectors nearest exp(i phase), and their mean phase."""
    w, v = np.linalg.eig(c)
    d = wrap(np.angle(w) - phase)
    idx = np.argsort(np.abs(d))[:mult]
    q, _ = np.linalg.qr(v[:, idx])
    return q @ q.conj().T, phase + float(np.mean(d[idx]))


def near_root_refine(C: ScatteringFamily, R: float, z0: float, v, mode: str = "full") -> list[RefinedRoot]:
    """Per eigen-branch, a true root z_j near z0 and w_j = P_j(z_j) v."""
    v = np.asarray(v, dtype=complex)
    fac = _factor(R, mode)
    nv = float(np.linalg.norm(v))
    res = float(np.linalg.norm(np.exp(1j * fac * z0) * C(z0) @ v - v))
    if not res < nv:
        raise PreconditionError(f"residual {res:.3e} is not below |v| = {nv:.3e}")
    out = []
    for phase, mult in _constant_groups(C(z0)):
        p0, th0 = _spectral_projection(C(z0), phase, mult)
        vj = p0 @ v
        if float(np.vdot(vj, vj).real) < nv * res:
            w, z, trivial = np.zeros_like(v), z0, True
            pz = p0
        else:
            k = int(np.round((fac * z0 + th0) / TWO_PI))

            def theta(x):
                return _spectral_projection(C(x), th0, mult)[1]

            def f(x):
                return fac * x + theta(x) - TWO_PI * k

            def df(x, h=1e-7):
                return (f(x + h) - f(x - h)) / (2 * h)

            half = np.pi / fac
            lo, hi = z0 - half, z0 + half
            while f(lo) > 0:
                lo -= half
            while f(hi) < 0:
                hi += half
            z = z0 if f(z0) == 0 else safeguarded_newton(f, df, lo, hi)
            pz, _ = _spectral_projection(C(z), th0, mult)
            w, trivial = pz @ v, False
        fp = float(np.linalg.norm(np.exp(1j * fac * z) * C(z) @ w - w))
        out.append(RefinedRoot(
            z=float(z), w=w, branch_phase=th0, multiplicity=mult, trivial=trivial,
            bound_z=((z - z0) ** 2, res / nv if nv else 0.0),
            bound_w=(float(np.linalg.norm(vj - w) ** 2), nv * res),
            fixed_point_residual=fp))
    return out


def positive_roots(C: ScatteringFamily, R: float, gamma: float, mode: str = "full") -> np.ndarray:
    return lambda_roots(C, R, (0.0, gamma), mode).with_multiplicity()


def lambda_compare(C: ScatteringFamily, R: float, gamma: float, f: Callable[[np.ndarray], np.ndarray],
                   kappa: float = 0.5, mode: str = "full") -> float:
    """|sum_{rho in Lambda_R(C), rho < gamma} f(rho) - sum_{lambda in Lambda*_R(C), lambda < gamma} f(lambda)|."""
    if not R ** (-1 + kappa) <= gamma <= 1:
        raise ValueError(f"gamma={gamma} outside [R^(-1+kappa), 1]")
    full = positive_roots(C, R, gamma, mode)
    frozen = positive_roots(C.frozen(), R, gamma, mode)
    return float(abs(np.sum(f(full)) - np.sum(f(frozen))))


def root_gap_bound(gamma: float, sup_df: float, sup_f: float) -> float:
    """The Prop. A.3 envelope without its constant: gamma^2 sup|f'| + gamma sup|f|."""
    return gamma**2 * sup_df + gamma * sup_f
