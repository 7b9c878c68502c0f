"""
Gluing a circle from two arcs
=============================

A circle of length a + b + 4R is cut into two arcs joined by cylinders of
length 2R. Every spectrum here is an arithmetic progression, so all three
zeta determinants have closed forms and the gluing identity can be read off
exactly.
"""

import numpy as np

from torsion_glue.gluing import CircleGeometry, circle_catalogs, circle_gluing_check, circle_mv_complex, fd_spectrum

g = CircleGeometry(a=1.0, b=2.0)
R = 1.5
ell, l1, l2 = g.lengths(R)
print(f"circle length {ell}, arcs {l1} and {l2}")

# The catalogs hold the nonzero Laplace spectra as progressions.
for name, cat in circle_catalogs(g, R).items():
    print(name, [(e.degree, e.multiplicity, e.eigenvalues(3).round(4).tolist()) for e in cat.entries])

# A fourth-order finite-difference Laplacian agrees with the Dirichlet progression.
print("FD Dirichlet:", fd_spectrum(l1, "dirichlet", 4).round(4))
print("exact       :", ((np.pi * np.arange(1, 5) / l1) ** 2).round(4))

# The Mayer-Vietoris complex of harmonic forms is tiny and exact.
mv = circle_mv_complex(g, R)
print("MV dims:", mv.dims)

# Half the zeta determinants minus log torsion gives log 2 for every R.
for R in (0.5, 1.5, 10.0):
    rep = circle_gluing_check(g, R)
    print(f"R={R:5}: combination={rep.combination:.15f}  log 2={np.log(2):.15f}  FD rel={rep.fd_max_rel_error:.1e}")
