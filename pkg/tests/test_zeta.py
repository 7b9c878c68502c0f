import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import unitary_group

from torsion_glue.acceptance import load_fixtures
from torsion_glue.scattering import LimitingSubspace, YModel, c12_matrix, random_pair
from torsion_glue.zeta import (EigenvalueCatalog, Progression, hurwitz_zeta, model_catalog, model_weighted_zeta_prime0,
                               model_zeta_prime0, progression_pair_share, progression_zeta_prime0,
                               single_progression_closed, single_progression_zeta_prime0)


def test_hurwitz_examples():
    assert hurwitz_zeta(2, 1).real == pytest.approx(np.pi ** 2 / 6, abs=1e-12)
    for a in (0.1, 0.5, 1.0, 3.0):
        assert hurwitz_zeta(0, a).real == pytest.approx(0.5 - a, abs=1e-12)
    assert hurwitz_zeta(0, 1, derivative=1).real == pytest.approx(-0.5 * np.log(2 * np.pi), abs=1e-10)


def test_hurwitz_pole_and_domain():
    with pytest.raises(ValueError):
        hurwitz_zeta(1, 0.5)
    with pytest.raises(ValueError):
        hurwitz_zeta(0.5, 0.0)


@given(s=st.floats(-4, 4).filter(lambda x: abs(x - 1) > 1e-3), a=st.floats(1e-3, 20))
def test_hurwitz_against_mpmath(s, a):
    for d in (0, 1):
        ref = complex(mp.zeta(s, a, d))
        assert abs(hurwitz_zeta(s, a, d) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_hurwitz_frozen_fixtures():
    for f in load_fixtures()["hurwitz"]:
        assert hurwitz_zeta(f["s"], f["a"]).real == pytest.approx(f["value"], rel=1e-12, abs=1e-12)
        assert hurwitz_zeta(f["s"], f["a"], 1).real == pytest.approx(f["derivative"], rel=1e-12, abs=1e-12)


def test_progression_examples():
    assert progression_zeta_prime0(0, 1) == pytest.approx(np.log(4))
    for R in (0.3, 1, 50):
        assert progression_zeta_prime0(np.pi, R) == pytest.approx(np.log(2))
    assert progression_zeta_prime0(np.pi / 2, 3) == pytest.approx(0.5 * np.log(2))
    assert progression_pair_share(np.pi / 2, 3) == pytest.approx(0.5 * np.log(2), abs=1e-9)
    with pytest.raises(ValueError):
        progression_zeta_prime0(4.0, 1)


def test_single_progression_is_r_dependent_off_symmetric_points():
    a, b = single_progression_zeta_prime0(np.pi / 2, 3), single_progression_zeta_prime0(np.pi / 2, 30)
    assert abs(a - b) > 0.1
    for th in (0.0, 0.4, 2.0, np.pi, 5.5):
        assert single_progression_zeta_prime0(th, 2.0) == pytest.approx(single_progression_closed(th, 2.0), abs=1e-12)


def test_progression_grid():
    for j in range(7):
        for R in (0.5, 1, 10, 100):
            th = np.pi * j / 6
            assert progression_zeta_prime0(th, R) == pytest.approx(progression_pair_share(th, R), abs=1e-9)


def test_progression_type():
    with pytest.raises(ValueError):
        Progression(7.0, 1.0)
    with pytest.raises(ValueError):
        Progression(0.0, 1.0, multiplicity=0)
    assert np.allclose(Progression(0.0, 0.25).eigenvalues(3), (2 * np.pi * np.arange(1, 4)) ** 2)


def test_model_zeta_cases():
    for R in (0.5, 1, 7, 100):
        assert model_zeta_prime0(np.eye(1), R) == pytest.approx(np.log(4 * R), abs=1e-10)
        assert model_zeta_prime0(-np.eye(1), R) == pytest.approx(np.log(2), abs=1e-10)
    c = np.diag(np.exp([1j * np.pi / 3, -1j * np.pi / 3]))
    assert model_zeta_prime0(c, 2.0) == pytest.approx(0.0, abs=1e-12)
    assert model_zeta_prime0(c, 2.0) == pytest.approx(2 * progression_zeta_prime0(np.pi / 3, 2.0), abs=1e-12)


def test_model_zeta_requires_conjugation_closed():
    with pytest.raises(ValueError, match="conjugation"):
        model_zeta_prime0(np.diag(np.exp([0.5j, 1.0j])), 1.0)


@given(seed=st.integers(0, 2**32 - 1), R=st.sampled_from([0.5, 1.0, 10.0]))
def test_model_zeta_is_branch_sum(seed, R):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    phases = rng.uniform(0.1, 3.0, size=n)
    extra = [0.0] * int(rng.integers(0, 2)) + [np.pi] * int(rng.integers(0, 2))
    eig = np.exp(1j * np.concatenate([phases, -phases, extra]))
    q = unitary_group.rvs(len(eig), random_state=rng) if len(eig) > 1 else np.eye(1)
    c = q @ np.diag(eig) @ q.conj().T
    branch_sum = sum(progression_zeta_prime0(abs(float(np.angle(e))), R) for e in eig)
    assert model_zeta_prime0(c, R) == pytest.approx(branch_sum, abs=1e-10)
    cat = EigenvalueCatalog.from_matrix(c, R)
    assert cat.zeta_prime0().zeta_prime_0 == pytest.approx(branch_sum, abs=1e-10)
    r = int(np.sum(np.abs(eig - 1) < 1e-9))
    assert model_zeta_prime0(c, R) - model_zeta_prime0(c, 2 * R) == pytest.approx(r * np.log(0.5), abs=1e-10)


def test_weighted_model_examples():
    y = YModel.of([1])
    w = LimitingSubspace.whole(y)
    R = 3.0
    assert model_weighted_zeta_prime0("glued", w, w, R) == pytest.approx(-np.log(2 * R) - np.log(2))
    with pytest.raises(ValueError):
        model_weighted_zeta_prime0("side3", w, w, R)


def test_weighted_model_recomposition(rng):
    for _ in range(20):
        L1, L2 = random_pair(YModel.of([3, 2, 3]), rng, overlap=0.2)
        R = 5.0
        blocks = c12_matrix(L1, L2).blocks
        per_block = sum((-1) ** p * p * model_zeta_prime0(b, R) for p, b in enumerate(blocks) if len(b))
        # model_zeta_prime0 counts m log 2 per block; the glued formula books -chi(Y) log 2 instead
        m_term = sum((-1) ** p * p * len(b) for p, b in enumerate(blocks)) * np.log(2)
        chi = 3 - 2 + 3
        glued = model_weighted_zeta_prime0("glued", L1, L2, R)
        assert glued == pytest.approx(per_block - m_term - chi * np.log(2), abs=1e-10)
        for which in ("glued", "side1", "side2"):
            spectral = model_catalog(which, L1, L2, R).zeta_prime0(weighted=True).zeta_prime_0
            assert spectral == pytest.approx(model_weighted_zeta_prime0(which, L1, L2, R), abs=1e-10)
