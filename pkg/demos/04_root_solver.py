"""
Roots of det(exp(4iR lambda) C(lambda) - 1)
===========================================

The small eigenvalues of the stretched Laplacian are lambda^2 for the roots
of a transcendental equation. Each eigenphase branch theta_j of C(lambda)
contributes the roots of 4R lambda + theta_j(lambda) = 2 pi k.
"""

import numpy as np

from torsion_glue.scattering import ScatteringFamily
from torsion_glue.spectra import lambda_roots

# Constant C = Id: roots are pi k / (2R).
R = 2.0
roots = lambda_roots(ScatteringFamily.constant(np.eye(1)), R, (0.0, 3.0)).roots
print("Id   :", [round(r.lam, 12) for r in roots])
print("pi k/(2R):", [round(np.pi * k / (2 * R), 12) for k in range(1, len(roots) + 1)])

# A rotation by alpha splits every root into a pair.
alpha = np.pi / 3
rot = np.diag(np.exp([1j * alpha, -1j * alpha]))
roots = lambda_roots(ScatteringFamily.constant(rot), R, (0.0, 3.0)).roots
print("rot  :", [(r.branch, r.k, round(r.lam, 10)) for r in roots])

# A phase that moves linearly in lambda shifts roots to (2 pi k - alpha) / (4R + rate).
rate = 0.5
fam = ScatteringFamily.phase_linear(np.diag([np.exp(1j * alpha)]), rate)
for r in lambda_roots(fam, R, (0.0, 3.0)).roots:
    print(f"k={r.k}: {r.lam:.12f}  predicted {(2 * np.pi * r.k - alpha) / (4 * R + rate):.12f}  residual {r.residual:.1e}")
