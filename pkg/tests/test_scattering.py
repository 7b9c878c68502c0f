import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torsion_glue.hermitian import same_subspace
from torsion_glue.scattering import (DuOperators, InvariantError, LimitingSubspace, ScatteringFamily,
                                     ScatteringMatrix, YModel, c12, c12_matrix, c_bd, chi_euler, chi_prime_of,
                                     chi_prime_top, dimension_bookkeeping, kernel_predictions, limiting_from_scattering,
                                     random_limiting_subspace, random_pair, scattering_from_subspace)


def test_ymodel_blocks():
    y = YModel.of([3, 2, 3])
    assert [y.block_dim(p) for p in y.degrees] == [3, 5, 5, 3]
    with pytest.raises(Exception):
        YModel.of([-1])


@pytest.mark.parametrize("h, chi", [([1], 1), ([1, 1], 0), ([2], 2)])
def test_chi_euler(h, chi):
    assert chi_euler(YModel.of(h)) == chi


def test_du_operators():
    ops = DuOperators(YModel.of([2, 1, 3]))
    n = ops.du.shape[0]
    assert np.allclose(ops.du @ ops.du, 0)
    assert np.allclose(ops.iu @ ops.iu, 0)
    assert np.allclose(ops.clifford @ ops.clifford, -np.eye(n))
    assert np.allclose(ops.clifford.conj().T, -ops.clifford)


def test_whole_and_zero():
    y = YModel.of([2, 1])
    assert np.allclose(scattering_from_subspace(LimitingSubspace.whole(y)).full, np.eye(y.total_dim))
    assert np.allclose(scattering_from_subspace(LimitingSubspace.zero(y)).full, -np.eye(y.total_dim))
    assert limiting_from_scattering(ScatteringMatrix(y, [np.eye(y.block_dim(p)) for p in y.degrees])).dims() == \
        [y.block_dim(p) for p in y.degrees]
    assert sum(limiting_from_scattering(ScatteringMatrix(y, [-np.eye(y.block_dim(p)) for p in y.degrees])).dims()) == 0


def test_lagrangian_condition_enforced():
    y = YModel.of([2])
    with pytest.raises(InvariantError):
        LimitingSubspace(y, [np.eye(2)[:, :1], np.zeros((0, 0))], [np.zeros((0, 0)), np.eye(2)[:, :1]])


@given(seed=st.integers(0, 2**32 - 1))
def test_scattering_invariants(seed):
    rng = np.random.default_rng(seed)
    y = YModel.of([int(x) for x in rng.integers(0, 4, size=int(rng.integers(1, 4)))])
    L = random_limiting_subspace(y, rng)
    C = scattering_from_subspace(L)
    assert C.unitarity_defect() < 1e-10
    assert C.involution_defect() < 1e-10
    assert C.clifford_defect() < 1e-10
    back = limiting_from_scattering(C)
    assert all(same_subspace(back.basis(p), L.basis(p)) for p in y.degrees)


def test_c_bd_examples():
    y = YModel.of([1])
    C = scattering_from_subspace(LimitingSubspace.whole(y))
    b2, b1 = c_bd(C, 2), c_bd(C, 1)
    assert np.allclose(b2.blocks[0], [[1]]) and np.allclose(b2.blocks[1], [[-1]])
    assert np.allclose(b1.blocks[0], [[-1]]) and np.allclose(b1.blocks[1], [[1]])


def test_chi_prime_examples():
    y = YModel.of([1])
    whole = scattering_from_subspace(LimitingSubspace.whole(y))
    assert chi_prime_of(whole) == -1
    assert chi_prime_of(scattering_from_subspace(LimitingSubspace.zero(y))) == 0
    L = LimitingSubspace.from_abs(y, [np.eye(1)])
    assert chi_prime_top(L, L) == 0
    rep = chi_prime_top(L, L, report=True)
    assert rep.image_route == rep.chi_prime
    w = LimitingSubspace.whole(y)
    assert isinstance(chi_prime_top(w, w), int)
    z = LimitingSubspace.zero(y)
    assert isinstance(chi_prime_top(z, z), int)


@given(seed=st.integers(0, 2**32 - 1))
def test_kernel_descriptions(seed):
    rng = np.random.default_rng(seed)
    y = YModel.of([int(x) for x in rng.integers(1, 4, size=int(rng.integers(1, 4)))])
    L1, L2 = random_pair(y, rng)
    for p in y.degrees:
        for name, (got, predicted) in kernel_predictions(L1, L2, p).items():
            assert same_subspace(got, predicted), (name, p)
    for h, x, yy, u, v in dimension_bookkeeping(L1, L2):
        assert h == x + yy - u + v


def test_c12_family_examples(rng):
    y = YModel.of([2, 1])
    L = random_limiting_subspace(y, rng)
    C = ScatteringFamily.constant(scattering_from_subspace(L))
    assert np.allclose(c12(C, C).at0(), np.eye(y.total_dim))
    idf = ScatteringFamily.constant(np.eye(3))
    assert np.allclose(c12(idf, ScatteringFamily.constant(-np.eye(3))).at0(), -np.eye(3))
    L1, L2 = random_pair(y, rng)
    m = c12_matrix(L1, L2)
    assert m.unitarity_defect() < 1e-10
    # at lambda = 0 with involutive matrices C2^{-1} C1 = C2 C1
    c1, c2 = scattering_from_subspace(L1).full, scattering_from_subspace(L2).full
    assert np.allclose(m.full, c2 @ c1)


def test_family_checks(rng):
    h = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    h = (h + h.conj().T) / 2
    f = ScatteringFamily([np.eye(3), h], radius=1.0, form="exponential")
    assert f.unitarity_defect() < 1e-8
    assert f.reciprocity_defect() < 1e-8
    with pytest.raises(Exception):
        ScatteringFamily([np.eye(2), np.array([[0, 1], [0, 0]])], form="exponential")
