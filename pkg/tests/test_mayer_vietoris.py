import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_glue.complexes import is_exact, log_torsion
from torsion_glue.mayer_vietoris import (Perturbation, ScaledDiagram, build_l_sequence, euler_identity,
                                         log_mv_asymptotic_rhs, log_mv_torsion_scaled, scaled_error, torsion_l,
                                         torsion_l_closed_form)
from torsion_glue.scattering import InvariantError, LimitingSubspace, YModel, chi_prime_top, random_pair

seeds = st.integers(0, 2**32 - 1)


def angle_pair(theta):
    y = YModel.of([2])
    L1 = LimitingSubspace.from_abs(y, [np.array([1.0, 0.0])])
    L2 = LimitingSubspace.from_abs(y, [np.array([np.cos(theta), np.sin(theta)])])
    return L1, L2


def test_identical_subspaces_have_unit_torsion(rng):
    for _ in range(5):
        L, _ = random_pair(YModel.of([3, 2, 3]), rng)
        assert torsion_l(build_l_sequence(L, L)) == pytest.approx(1.0, abs=1e-12)
        assert torsion_l_closed_form(L, L) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("theta", [0.3, np.pi / 4, 1.2, np.pi / 2])
def test_angle_example(theta):
    L1, L2 = angle_pair(theta)
    seq = build_l_sequence(L1, L2)
    assert seq.dims == [0, 0, 1, 1, 0, 0]
    assert torsion_l(seq) == pytest.approx(1 / np.sin(theta), rel=1e-12)
    assert torsion_l_closed_form(L1, L2) == pytest.approx(torsion_l(seq), rel=1e-12)


@settings(max_examples=25)
@given(seed=seeds)
def test_closed_form_matches_brute_force(seed):
    L1, L2 = random_pair(YModel.of([3, 2, 3]), np.random.default_rng(seed), overlap=0.4)
    seq = build_l_sequence(L1, L2)
    forms = torsion_l_closed_form(L1, L2, both=True)
    t = torsion_l(seq)
    assert forms.c12_form == pytest.approx(t, rel=1e-10)
    assert forms.sign_form == pytest.approx(t, rel=1e-10)
    assert forms.sign_form_literal == pytest.approx(1 / t, rel=1e-10)
    assert euler_identity(seq) == 0
    assert sum((-1) ** p * d for p, d in enumerate(seq.d)) == chi_prime_top(L1, L2)


def test_non_lagrangian_rejected():
    y = YModel.of([1])
    with pytest.raises(InvariantError):
        build_l_sequence(LimitingSubspace.whole(y), LimitingSubspace.zero(y))


def test_rhs_scales_with_chi_prime(rng):
    L1, L2 = random_pair(YModel.of([3, 2, 3]), rng)
    chi = chi_prime_top(L1, L2)
    diff = log_mv_asymptotic_rhs(L1, L2, 10.0) - log_mv_asymptotic_rhs(L1, L2, 1.0)
    assert diff == pytest.approx(chi * np.log(10.0), abs=1e-10)


def test_scaled_diagram_without_compact_part_is_exact(rng):
    for _ in range(5):
        L1, L2 = random_pair(YModel.of([3, 2, 3]), rng)
        for R in (1.0, 7.0, 100.0):
            assert scaled_error(L1, L2, R, compact_scale=0.0) < 1e-9


def test_scaled_diagram_converges(rng):
    L1, L2 = random_pair(YModel.of([2, 1, 2]), rng)
    kw = dict(l2_dims=[(1, 1), (0, 1), (1, 0), (0, 0)], perturbation=Perturbation(0.1, 1.0, 3))
    errs = [scaled_error(L1, L2, R, **kw) for R in (1e2, 1e3, 1e4)]
    assert errs[2] < 1e-3
    assert errs[0] > errs[1] > errs[2]


def test_middle_row_is_exact_and_l2_part_is_invisible(rng):
    L1, L2 = random_pair(YModel.of([2, 1, 2]), rng)
    d0 = ScaledDiagram(L1, L2, 5.0, compact_scale=0.0)
    d1 = ScaledDiagram(L1, L2, 5.0, l2_dims=[(2, 1), (1, 0), (0, 2), (1, 1)], compact_scale=0.0)
    assert is_exact(d1.middle_row())
    assert log_mv_torsion_scaled(d1) == pytest.approx(log_mv_torsion_scaled(d0), abs=1e-10)
    assert log_torsion(d0.middle_row(), method="laplacian") == pytest.approx(log_mv_torsion_scaled(d0), abs=1e-8)


def test_scaled_diagram_validation(rng):
    L1, L2 = random_pair(YModel.of([1, 1]), rng)
    with pytest.raises(ValueError):
        ScaledDiagram(L1, L2, 0.5)
    with pytest.raises(ValueError):
        ScaledDiagram(L1, L2, 2.0, l2_dims=[(1, 1)])
