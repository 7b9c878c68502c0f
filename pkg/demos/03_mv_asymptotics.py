"""
Mayer-Vietoris torsion as R grows
=================================

The middle row of the three-row diagram carries metrics that grow linearly
in R on the limiting-value part. Its torsion approaches an explicit power of
R times a determinant built from the C12 blocks.
"""

import numpy as np

from torsion_glue.mayer_vietoris import (Perturbation, build_l_sequence, mv_asymptotic_rhs, scaled_error, torsion_l,
                                         torsion_l_closed_form)
from torsion_glue.scattering import LimitingSubspace, YModel, chi_prime_top, random_pair

# Two lines at angle theta in C^2: the L-sequence torsion is 1/sin(theta).
y = YModel.of([2])
for theta in (0.2, 0.8, np.pi / 2):
    L1 = LimitingSubspace.from_abs(y, [np.array([1.0, 0.0])])
    L2 = LimitingSubspace.from_abs(y, [np.array([np.cos(theta), np.sin(theta)])])
    print(f"theta={theta:.3f}: T_L={torsion_l(build_l_sequence(L1, L2)):.12f}  1/sin={1 / np.sin(theta):.12f}")

# A random pair: brute force against the closed form.
rng = np.random.default_rng(8)
L1, L2 = random_pair(YModel.of([3, 2, 3]), rng)
print("T_L brute:", torsion_l(build_l_sequence(L1, L2)), " closed:", torsion_l_closed_form(L1, L2))
print("chi' =", chi_prime_top(L1, L2))

# The scaled middle row converges like 1/R, with or without bounded perturbations.
kw = dict(l2_dims=[(1, 1), (0, 2), (1, 0), (0, 0)])
for R in (1e1, 1e2, 1e3, 1e4):
    plain = scaled_error(L1, L2, R, **kw)
    pert = scaled_error(L1, L2, R, perturbation=Perturbation(0.1, 1.0, 5), **kw)
    print(f"R={R:8.0f}: rhs={mv_asymptotic_rhs(L1, L2, R):.4e}  rel err {plain:.2e}  perturbed {pert:.2e}")
