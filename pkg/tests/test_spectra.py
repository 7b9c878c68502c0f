import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import unitary_group

from torsion_glue.scattering import ScatteringFamily
from torsion_glue.spectra import (BranchAmbiguityError, PreconditionError, lambda_compare, lambda_roots,
                                  near_root_refine, phase_branches, root_residual)


def test_branches_constant():
    pb = phase_branches(ScatteringFamily.constant(np.eye(2)), (-1, 1))
    assert np.allclose(pb.values, 0)
    c = np.diag(np.exp([1j * np.pi / 3, -1j * np.pi / 3]))
    pb = phase_branches(ScatteringFamily.constant(c), (-1, 1))
    assert np.allclose(np.sort(pb.values[:, 0]), [-np.pi / 3, np.pi / 3])


def test_branch_of_truncated_exponential():
    f = ScatteringFamily([np.eye(1), 1j * np.eye(1), -0.5 * np.eye(1), -1j / 6 * np.eye(1)], form="series")
    pb = phase_branches(f, (-0.5, 0.5))
    for lam in np.linspace(-0.45, 0.45, 7):
        assert pb.theta(0, lam) == pytest.approx(np.angle(f(lam)[0, 0]), abs=1e-6)
        assert pb.theta(0, lam) == pytest.approx(lam, abs=3e-3)


def test_branch_jump_is_reported():
    f = ScatteringFamily([np.eye(1)], form="composite", func=lambda lam: np.eye(1) * np.exp(1j * 400 * lam))
    with pytest.raises(BranchAmbiguityError):
        phase_branches(f, (0, 1), grid_step=0.01)


def test_roots_identity_and_minus_identity():
    roots = lambda_roots(ScatteringFamily.constant(np.eye(2)), 1.0, (0, 2 * np.pi))
    assert np.allclose(roots.values, [np.pi / 2, np.pi, 3 * np.pi / 2], atol=1e-15)
    assert all(r.multiplicity == 2 for r in roots.roots)
    roots = lambda_roots(ScatteringFamily.constant(-np.eye(1)), 1.0, (0, np.pi))
    assert np.allclose(roots.values, [np.pi / 4, 3 * np.pi / 4], atol=1e-15)


def test_roots_linear_family():
    a, R = 0.1, 10.0
    f = ScatteringFamily([np.eye(1), 1j * a * np.eye(1), -(a ** 2) / 2 * np.eye(1)], form="series")
    exact = ScatteringFamily.phase_linear(np.eye(1), a)
    got = lambda_roots(exact, R, (0, 1)).values
    k = np.arange(1, 20)
    expected = 2 * np.pi * k / (4 * R + a)
    assert np.allclose(got, expected[expected < 1], atol=1e-10)
    assert len(lambda_roots(f, R, (0, 1)).values) == len(got)


def test_root_residuals_and_density(rng):
    for _ in range(5):
        u = unitary_group.rvs(3, random_state=rng)
        h = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        f = ScatteringFamily([u, 0.2 * (h + h.conj().T)], form="exponential")
        R, w = 5.0, 1.0
        ls = lambda_roots(f, R, (0.0, w))
        assert all(r.residual < 1e-9 for r in ls.roots)
        assert sum(r.multiplicity for r in ls.roots) <= 3 * (np.ceil(2 * R * w / np.pi) + 1)


def test_roots_conjugation_symmetry():
    c = np.diag(np.exp([0.7j, -0.7j, 1j * np.pi]))
    f = ScatteringFamily.constant(c)
    pos = lambda_roots(f, 2.0, (0, 5)).with_multiplicity()
    neg = lambda_roots(f, 2.0, (-5, 0)).with_multiplicity()
    assert np.allclose(np.sort(pos), np.sort(-neg))


def test_boundary_mode():
    roots = lambda_roots(ScatteringFamily.constant(np.eye(1)), 1.0, (0, 7), mode="boundary")
    assert np.allclose(roots.values, [np.pi, 2 * np.pi])
    assert root_residual(ScatteringFamily.constant(np.eye(1)), 1.0, np.pi, mode="boundary") < 1e-12


def test_near_root_exact_and_perturbed(rng):
    c = np.diag([1.0, -1.0, 1j])
    f = ScatteringFamily.constant(c)
    R = 2.0
    root = 2 * np.pi / (4 * R)
    v = np.array([1.0, 0, 0])
    out = near_root_refine(f, R, root, v)
    hit = [o for o in out if not o.trivial]
    assert len(hit) == 1 and hit[0].z == pytest.approx(root, abs=1e-14)
    assert np.allclose(hit[0].w, v)
    out = near_root_refine(f, R, root + 1e-4, v)
    assert all(o.bounds_hold for o in out)
    assert all(o.fixed_point_residual <= 1e-10 for o in out)


def test_near_root_property_sweep(rng):
    q = unitary_group.rvs(3, random_state=rng)
    c = q @ np.diag([1, -1, 1]) @ q.conj().T
    f = ScatteringFamily.constant(c)
    R, done = 50.0, 0
    while done < 100:
        z0 = float(rng.uniform(0.05, 1))
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        try:
            out = near_root_refine(f, R, z0, v)
        except PreconditionError:
            continue
        done += 1
        assert all(o.bounds_hold and o.fixed_point_residual <= 1e-10 for o in out)


def test_precondition_refused():
    f = ScatteringFamily.constant(np.eye(1))
    with pytest.raises(PreconditionError):
        near_root_refine(f, 1.0, np.pi / 4, np.array([1.0]))


def test_lambda_compare_constant_and_counting():
    f = ScatteringFamily.constant(np.diag(np.exp([0.4j, -0.4j])))
    assert lambda_compare(f, 10.0, 0.8, np.sin) == 0.0
    a, R, gamma = 0.5, 10.0, 0.9
    lin = ScatteringFamily.phase_linear(np.eye(1), a)
    k = np.arange(1, 50)
    expected = abs(np.sum(2 * np.pi * k / (4 * R + a) < gamma) - np.sum(2 * np.pi * k / (4 * R) < gamma))
    assert lambda_compare(lin, R, gamma, np.ones_like) == expected
    with pytest.raises(ValueError):
        lambda_compare(lin, R, 1e-3, np.sin)
