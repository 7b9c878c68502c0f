"""Command-line front end: spectrum, zeta, mv, gluing and verify."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .gluing import CircleGeometry, GluingScenario, circle_gluing_check, full_report, zeta_gluing_model_check
from .mayer_vietoris import log_mv_asymptotic_rhs, log_mv_torsion_scaled, ScaledDiagram
from .scattering import ScatteringFamily, YModel, random_pair
from .spectra import lambda_roots
from .zeta import model_zeta_prime0

OUTDIR_ENV = "TORSION_GLUE_OUTDIR"
REPORT_FORMAT = "torsion-glue-verify"
REPORT_VERSION = 1
FAMILIES = ("identity", "minus-identity", "rotation", "phase-linear")


@dataclass
class RunConfig:
    command: str = "verify"
    seed: int = 0
    R: float = 1.0
    window: tuple[float, float] = (0.0, 2 * math.pi)
    family: str = "identity"
    alpha: float = math.pi / 3
    rate: float = 0.5
    h: tuple[int, ...] = (3, 2, 3)
    R_grid: tuple[float, ...] = (1.0, 10.0, 100.0)
    scenarios: int = 5
    a: float = 1.0
    b: float = 1.0
    criteria: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8, 9)
    out: str | None = None
    report_format: str = "json"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kw = {}
        for k, v in d.items():
            default = getattr(cls(), k)
            if isinstance(default, tuple):
                kw[k] = tuple(type(default[0])(x) if default else x for x in v)
            elif isinstance(default, float):
                kw[k] = float(v)
            elif isinstance(default, int) and not isinstance(default, bool):
                kw[k] = int(v)
            else:
                kw[k] = v
        return cls(**kw)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def dumps(obj, indent: int = 1, _level: int = 0) -> str:
    """Canonical JSON: sorted keys, floats with 17 significant digits, LF newlines."""
    pad, inner = " " * indent * _level, " " * indent * (_level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + dumps(v, indent, _level + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt_float(x) if math.isfinite(x) else json.dumps(str(x))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return json.dumps(str(obj))


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _outdir() -> Path | None:
    d = os.environ.get(OUTDIR_ENV)
    return Path(d) if d else None


def _emit(text: str, cfg: RunConfig, default_name: str) -> None:
    sys.stdout.write(text)
    target = Path(cfg.out) if cfg.out else (_outdir() / default_name if _outdir() else None)
    if target is not None:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8", newline="\n")


def _write_report(report: dict, cfg: RunConfig, name: str) -> Path:
    base = _outdir() or Path("torsion-glue-reports")
    path = Path(cfg.out).with_suffix(".report.json") if cfg.out else base / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(report) + "\n", encoding="utf-8", newline="\n")
    return path


def _family(cfg: RunConfig) -> ScatteringFamily:
    if cfg.family == "identity":
        return ScatteringFamily.constant(np.eye(1))
    if cfg.family == "minus-identity":
        return ScatteringFamily.constant(-np.eye(1))
    rot = np.diag(np.exp([1j * cfg.alpha, -1j * cfg.alpha]))
    if cfg.family == "rotation":
        return ScatteringFamily.constant(rot)
    return ScatteringFamily.phase_linear(rot, cfg.rate)


def cmd_spectrum(cfg: RunConfig) -> int:
    ls = lambda_roots(_family(cfg), cfg.R, cfg.window)
    rows = [[cfg.R, r.branch, r.k, r.lam, r.multiplicity, r.residual, "spectra.lambda_roots"] for r in ls.roots]
    _emit(_csv_text(["R", "branch_index", "k", "lambda", "multiplicity", "residual", "provenance"], rows), cfg,
          "spectrum.csv")
    return 0


def cmd_zeta(cfg: RunConfig) -> int:
    closed = {"identity": math.log(4 * cfg.R), "minus-identity": math.log(2),
              "rotation": math.log(2 - 2 * math.cos(cfg.alpha))}
    if cfg.family not in closed:
        raise ValueError(f"zeta needs a constant family, one of {sorted(closed)}")
    c = _family(cfg).at0()
    value = model_zeta_prime0(c, cfg.R)
    sys.stderr.write(f"zeta'(0) = {fmt_float(value)}\n")
    rows = [[cfg.family, cfg.R, value, closed[cfg.family], "zeta.model_zeta_prime0"]]
    _emit(_csv_text(["C", "R", "zeta_prime_0", "closed_form", "provenance"], rows), cfg, "zeta.csv")
    return 0 if abs(value - closed[cfg.family]) <= 1e-10 else 1


def _pairs(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    y = YModel.of(cfg.h)
    return [random_pair(y, rng) for _ in range(cfg.scenarios)]


def cmd_mv(cfg: RunConfig) -> int:
    rows, status = [], 0
    for i, (L1, L2) in enumerate(_pairs(cfg)):
        errs = []
        for R in cfg.R_grid:
            if R < 1:
                raise ValueError("mv sweeps need R >= 1")
            lt = log_mv_torsion_scaled(ScaledDiagram(L1, L2, R, seed=cfg.seed + i))
            lr = log_mv_asymptotic_rhs(L1, L2, R)
            err = abs(math.expm1(lt - lr))
            errs.append(err)
            rows.append([i, R, math.exp(lt), math.exp(lr), err, "mayer_vietoris.mv_torsion_scaled"])
        if any(b >= a for a, b in zip(errs, errs[1:])):
            status = 1
    _emit(_csv_text(["scenario", "R", "torsion", "rhs", "rel_error", "provenance"], rows), cfg, "mv.csv")
    return status


def cmd_gluing(cfg: RunConfig) -> int:
    rows, ok = [], True
    scenarios = [GluingScenario(L1, L2, cfg.R_grid, name=f"scenario{i}") for i, (L1, L2) in enumerate(_pairs(cfg))]
    for s in scenarios:
        rep = zeta_gluing_model_check(s)
        ok &= rep.passed
        rows += [[s.name, r.R, r.lhs, r.rhs, r.abs_error, r.status, "gluing.zeta_gluing_model_check"]
                 for r in rep.rows]
    g = CircleGeometry(cfg.a, cfg.b)
    for R in cfg.R_grid:
        rep = circle_gluing_check(g, R)
        ok &= rep.status == "pass"
        rows.append(["circle", R, rep.combination, rep.expected, rep.abs_error, rep.status,
                     "gluing.circle_gluing_check"])
    _emit(_csv_text(["check", "R", "lhs", "rhs", "abs_error", "status", "provenance"], rows), cfg, "gluing.csv")
    if not ok:
        path = _write_report(full_report(scenarios, [g], cfg.R_grid), cfg, "gluing-report.json")
        sys.stderr.write(f"gluing check failed; report: {path}\n")
        return 1
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    from .acceptance import run_all

    results = run_all(cfg.seed, set(cfg.criteria))
    for r in results:
        print(r.line)
    passed = all(r.passed for r in results)
    report = {"format": REPORT_FORMAT, "version": REPORT_VERSION, "package_version": __version__,
              "seed": cfg.seed, "passed": passed,
              "criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "seconds": r.seconds,
                            "budget": r.budget, "metrics": r.metrics, "failures": r.failures} for r in results]}
    if not passed or cfg.out or _outdir():
        path = _write_report(report, cfg, "verify-report.json")
        (sys.stderr if not passed else sys.stdout).write(f"report: {path}\n")
    return 0 if passed else 1


COMMANDS = {"spectrum": cmd_spectrum, "zeta": cmd_zeta, "mv": cmd_mv, "gluing": cmd_gluing, "verify": cmd_verify}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x)


def _window(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    try:
        return float(lo), float(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"window must be lo:hi, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torsion-glue", description="Model-setting gluing checks for zeta "
                                "determinants and Mayer-Vietoris torsion.")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (flags override it)")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (default: stdout, plus $%s if set)" % OUTDIR_ENV)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="roots of det(exp(4iR lambda) C(lambda) - 1)")
    sp.add_argument("--R", type=float)
    sp.add_argument("--window", type=_window, help="lo:hi")
    sp.add_argument("--family", choices=FAMILIES)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--rate", type=float)

    sz = sub.add_parser("zeta", parents=[common], help="model zeta determinant of a constant matrix")
    sz.add_argument("--C", dest="family", choices=FAMILIES[:3])
    sz.add_argument("--R", type=float)
    sz.add_argument("--alpha", type=float)

    for name, text in (("mv", "Mayer-Vietoris torsion sweep"), ("gluing", "zeta gluing and circle checks")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--h", type=lambda t: tuple(int(x) for x in t.split(",")), help="Betti numbers, e.g. 3,2,3")
        s.add_argument("--R-grid", dest="R_grid", type=_floats, help="comma-separated R values")
        s.add_argument("--scenarios", type=int)
        if name == "gluing":
            s.add_argument("--a", type=float)
            s.add_argument("--b", type=float)

    sv = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    sv.add_argument("--only", dest="criteria", type=lambda t: tuple(int(x) for x in t.split(",")),
                    help="comma-separated criterion numbers")
    return p


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text(encoding="utf-8"))
    base["command"] = args.command
    for k, v in vars(args).items():
        if k not in ("config", "command") and v is not None:
            base[k] = list(v) if isinstance(v, tuple) else v
    if args.command == "mv" and "R_grid" not in base:
        base["R_grid"] = [1e2, 1e3, 1e4]
    return RunConfig.from_dict(base)


def run(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"torsion-glue: {exc}\n")
        return 2
    try:
        return COMMANDS[cfg.command](cfg)
    except ValueError as exc:
        sys.stderr.write(f"torsion-glue {cfg.command}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
