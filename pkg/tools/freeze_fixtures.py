"""Regenerate the frozen determinant fixtures with mpmath (independent of torsion_glue.zeta).

Run: python tools/freeze_fixtures.py
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30
OUT = Path(__file__).resolve().parents[1] / "src" / "torsion_glue" / "data" / "fixtures.json"
PROVENANCE = f"mpmath {mp.__version__}, dps=30, numerical s-derivative of Hurwitz zeta"


def progression(theta, R):
    """-d/ds sum_{k>=1} ((2 pi k - theta)/(4R))^(-2s) at s = 0."""
    theta, R = mp.mpf(theta), mp.mpf(R)
    scale = 2 * mp.pi / (4 * R)
    a = 1 - theta / (2 * mp.pi)
    return -mp.diff(lambda s: scale ** (-2 * s) * mp.zeta(2 * s, a), 0)


def pair_share(theta, R):
    if theta == 0:
        return progression(0, R)
    return (progression(theta, R) + progression(2 * mp.pi - mp.mpf(theta), R)) / 2


def circle(a, b, R):
    a, b, R = mp.mpf(a), mp.mpf(b), mp.mpf(R)
    ell, l1, l2 = a + b + 4 * R, a + 2 * R, b + 2 * R
    # weighted sum (-1)^p p over degrees: only degree 1 contributes
    z = -2 * progression(0, ell / 4)
    z1 = -progression(0, l1 / 2)
    z2 = -progression(0, l2 / 2)
    log_t = mp.log(mp.sqrt(l1 * l2) / ell)
    return {"a": float(a), "b": float(b), "R": float(R), "zeta_circle": float(z), "zeta_side1": float(z1),
            "zeta_side2": float(z2), "log_mv_torsion": float(log_t),
            "combination": float(z / 2 - z1 / 2 - z2 / 2 - log_t), "provenance": PROVENANCE}


def main():
    grid = []
    for j in range(7):
        theta = mp.pi * j / 6
        for R in (0.5, 1, 10, 100):
            grid.append({"theta": float(theta), "R": R, "pair_share": float(pair_share(theta, R)),
                         "single": float(progression(theta, R)), "provenance": PROVENANCE})
    hurwitz = [{"s": s, "a": a, "value": float(mp.zeta(s, a)), "derivative": float(mp.zeta(s, a, 1)),
                "provenance": f"mpmath {mp.__version__} zeta(s, a, derivative)"}
               for s in (-3.5, -1, 0, 0.5, 2, 3.75) for a in (0.001, 0.25, 1, 7.5)]
    circles = [circle(a, b, R) for a, b, R in [(1, 1, 0.5), (1, 2, 1), (0.5, 3, 2), (1, 1, 1), (1, 1, 2)]]
    data = {"format": "torsion-glue-fixtures", "version": 1, "progressions": grid, "hurwitz": hurwitz,
            "circles": circles}
    OUT.write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
