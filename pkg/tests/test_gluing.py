import json

import numpy as np
import pytest

from torsion_glue.acceptance import load_fixtures
from torsion_glue.gluing import (REPORT_FORMAT, REPORT_VERSION, CircleGeometry, GluingScenario, circle_catalogs,
                                 circle_gluing_check, circle_mv_complex, fd_check, fd_spectrum, full_report,
                                 scenario_invariants, zeta_gluing_model_check)
from torsion_glue.complexes import is_exact
from torsion_glue.scattering import LimitingSubspace, YModel, random_pair


def test_circle_example_and_r_invariance():
    g = CircleGeometry(1.0, 1.0)
    combos = [circle_gluing_check(g, R, fd=False).combination for R in (0.25, 1.0, 3.0, 40.0)]
    assert np.allclose(combos, np.log(2), atol=1e-10, rtol=0)


def test_circle_fixtures():
    for f in load_fixtures()["circles"]:
        rep = circle_gluing_check(CircleGeometry(f["a"], f["b"]), f["R"], fd=False)
        for key in ("zeta_circle", "zeta_side1", "zeta_side2", "log_mv_torsion", "combination"):
            assert getattr(rep, key) == pytest.approx(f[key], abs=1e-10)


def test_circle_mv_complex_is_exact():
    c = circle_mv_complex(CircleGeometry(0.5, 3.0), 2.0)
    assert c.dims == [0, 1, 1, 1, 1, 0]
    assert is_exact(c)


def test_circle_geometry_validation():
    with pytest.raises(ValueError):
        CircleGeometry(0.0, 1.0)
    assert CircleGeometry(1.0, 2.0).lengths(0.5) == (5.0, 2.0, 3.0)


@pytest.mark.parametrize("kind,length", [("periodic", 3.0), ("dirichlet", 2.0), ("neumann", 2.0)])
def test_fd_spectra_match_progressions(kind, length):
    ev = fd_spectrum(length, kind, 10)
    k = np.arange(1, 11)
    exact = np.repeat((2 * np.pi * np.arange(1, 6) / length) ** 2, 2) if kind == "periodic" else (np.pi * k / length) ** 2
    assert np.max(np.abs(ev - exact) / exact) < 1e-3


def test_fd_check_and_unknown_kind():
    assert fd_check(CircleGeometry(1.0, 2.0), 1.0) < 1e-3
    with pytest.raises(ValueError):
        fd_spectrum(1.0, "robin")


def test_circle_catalog_multiplicities():
    cats = circle_catalogs(CircleGeometry(1.0, 1.0), 1.0)
    assert [e.multiplicity for e in cats["circle"].entries] == [2, 2]
    assert [e.multiplicity for e in cats["side1"].entries] == [1, 1]


def test_model_check_passes(rng):
    L1, L2 = random_pair(YModel.of([3, 2, 3]), rng, overlap=0.3)
    rep = zeta_gluing_model_check(GluingScenario(L1, L2, (1.0, 10.0, 100.0)))
    assert rep.passed
    assert all(r.abs_error < 1e-10 for r in rep.rows)


def test_scenario_grid_validation(rng):
    L1, L2 = random_pair(YModel.of([1, 1]), rng)
    with pytest.raises(ValueError):
        GluingScenario(L1, L2, (10.0, 1.0))
    with pytest.raises(ValueError):
        GluingScenario(L1, L2, (0.0, 1.0))


def test_full_report_empty():
    rep = full_report([])
    assert rep == {"format": REPORT_FORMAT, "version": REPORT_VERSION, "provenance": "torsion_glue.gluing",
                   "passed": True, "checks": []}


def test_full_report_flags_invariant_violation(rng):
    y = YModel.of([1])
    good = GluingScenario(*random_pair(YModel.of([2, 1]), rng), name="good")
    bad = GluingScenario(LimitingSubspace.whole(y), LimitingSubspace.whole(y), name="bad")
    inv = scenario_invariants(bad)
    assert not inv["L1.lagrangian_splitting"]
    rep = full_report([good, bad], circles=[CircleGeometry(1.0, 1.0)], circle_R=(1.0,))
    json.dumps(rep)
    status = {c["name"]: c["status"] for c in rep["checks"]}
    assert status["good"] == "pass" and status["bad"] == "fail"
    assert "L1.lagrangian_splitting" in rep["checks"][1]["violated"]
    assert rep["checks"][2]["kind"] == "circle_gluing" and rep["checks"][2]["status"] == "pass"
    assert rep["passed"] is False
