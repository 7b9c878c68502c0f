import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torsion_glue.complexes import (FiniteComplex, NotExactError, canonical_section_norm, direct_sum, is_exact,
                                    log_torsion, random_exact_complex, shift, short_sequence, torsion)
from torsion_glue.hermitian import HermitianSpace, ValidationError


def test_exactness_examples():
    assert is_exact(short_sequence(np.eye(1)))
    assert not is_exact(short_sequence(np.zeros((1, 1))))


def test_non_exact_torsion_names_degree():
    with pytest.raises(NotExactError) as info:
        torsion(short_sequence(np.zeros((1, 1))))
    assert info.value.degree in (1, 2)


def test_d_squared_must_vanish():
    with pytest.raises(ValidationError):
        FiniteComplex.from_maps([np.eye(1), np.eye(1)])


def test_short_sequence_torsion():
    a = np.diag([2.0, 3.0])
    assert torsion(short_sequence(a)) == pytest.approx(6.0)
    assert torsion(short_sequence(a, degree=0)) == pytest.approx(1 / 6)
    assert torsion(short_sequence(np.eye(2))) == pytest.approx(1.0)
    assert canonical_section_norm(short_sequence(np.array([[5.0]]))) == pytest.approx(5.0)
    assert canonical_section_norm(short_sequence(np.eye(1))) == pytest.approx(1.0)


def test_laplacian_and_singular_forms_agree(rng):
    for _ in range(20):
        c = random_exact_complex(rng)
        assert log_torsion(c, "laplacian") == pytest.approx(log_torsion(c, "singular"), abs=1e-8)


def test_shift_rules():
    c = short_sequence(np.diag([2.0, 3.0]))
    assert torsion(shift(c, 0)) == pytest.approx(6.0)
    assert torsion(shift(c, 1)) == pytest.approx(1 / 6)
    assert torsion(shift(c, 2)) == pytest.approx(6.0)


def test_direct_sum_rules():
    c2, c3 = short_sequence(np.array([[2.0]])), short_sequence(np.array([[3.0]]))
    assert torsion(direct_sum(c2, c3)) == pytest.approx(6.0)
    trivial = FiniteComplex((HermitianSpace.standard(0),), ())
    assert torsion(direct_sum(c2, trivial)) == pytest.approx(2.0)


@given(seed=st.integers(0, 2**32 - 1))
def test_torsion_properties(seed):
    rng = np.random.default_rng(seed)
    c, d = random_exact_complex(rng), random_exact_complex(rng)
    t = torsion(c)
    assert canonical_section_norm(c) == pytest.approx(t, rel=1e-9)
    assert torsion(shift(c, 1)) * t == pytest.approx(1.0, rel=1e-9)
    assert torsion(shift(c, 2)) == pytest.approx(t, rel=1e-10)
    assert torsion(direct_sum(c, d)) == pytest.approx(t * torsion(d), rel=1e-9)


@given(seed=st.integers(0, 2**32 - 1))
def test_unitary_change_of_basis(seed):
    rng = np.random.default_rng(seed)
    c = random_exact_complex(rng)
    qs = [np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))[0] if d else np.eye(0)
          for d in c.dims]
    # new coordinates x' = Q^{-1} x; gram' = Q^H G Q
    maps = [np.linalg.solve(qs[j + 1], a @ qs[j]) if a.size else a for j, a in enumerate(c.maps)]
    grams = [q.conj().T @ s.gram @ q for q, s in zip(qs, c.spaces)]
    c2 = FiniteComplex.from_maps(maps, dims=c.dims, grams=grams)
    assert torsion(c2) == pytest.approx(torsion(c), rel=1e-9)
