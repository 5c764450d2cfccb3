"""Command-line front end: run the audit suite, persist reports, study convergence.

Configuration precedence, lowest to highest: built-in defaults, a JSON config
file (``--config``), environment variables prefixed ``BELTRAMI_``, then
command-line flags.  Reports carry no timestamps and all float channels pass
through a NaN-safe serializer, so two runs with the same resolved
configuration produce byte-identical ``report.json`` files.

Exit codes: 0 success (no unexpected discrepancy), 1 unexpected DISCREPANT
verdicts, 2 configuration errors, 3 unknown surface, 4 unknown case pattern.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from .errors import BeltramiError, ConfigParse, UnknownCase, UnknownSurface
from .registry import (CASES, MODES, RunEnv, run_case, run_suite, select_cases)
from .surfaces import CATALOG, SurfacePatch, parse_surface

SCHEMA_VERSION = "beltrami-report/1"

EXIT_OK = 0
EXIT_DISCREPANT = 1
EXIT_CONFIG = 2
EXIT_SURFACE = 3
EXIT_CASE = 4

# stencil step = sampling cell width * this factor, so a depth-2 nested
# stencil stays inside the inset sample window on every catalog chart
STEP_PER_CELL = 0.25

_ENV_PREFIX = "BELTRAMI_"
_ENV_LIST_SEP = ";"  # surface specs contain commas, so env lists use ';'


@dataclass
class RunConfig:
    surfaces: Optional[list] = None  # None -> whole catalog, not explicit
    cases: Optional[list] = None     # None -> every case; [] -> empty run
    mode: str = "analytic"
    grid: list = field(default_factory=lambda: [(7, 5)])
    out: str = "."
    seed: int = 42

    def echo(self) -> dict:
        return {
            "surfaces": list(self.surfaces) if self.surfaces is not None
            else sorted(CATALOG),
            "cases": list(self.cases) if self.cases is not None else None,
            "mode": self.mode,
            "grid": [f"{nu}x{nv}" for nu, nv in self.grid],
            "out": self.out,
            "seed": self.seed,
        }


def _parse_grid(text: str) -> list:
    grids = []
    for part in str(text).split(","):
        part = part.strip().lower()
        if "x" not in part:
            raise ConfigParse(f"bad grid {part!r} (expected NUxNV)")
        a, b = part.split("x", 1)
        try:
            nu, nv = int(a), int(b)
        except ValueError:
            raise ConfigParse(f"bad grid {part!r} (expected integers)") from None
        if nu < 2 or nv < 2:
            raise ConfigParse(f"grid {part!r} too small (need at least 2x2)")
        grids.append((nu, nv))
    return grids


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigParse(f"cannot read config file {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigParse(f"config file {path!r} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigParse(f"config file {path!r} must hold a JSON object")
    allowed = {"surfaces", "cases", "mode", "grid", "out", "seed"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigParse(f"unknown config keys {sorted(unknown)}; allowed {sorted(allowed)}")
    return doc


def _env_overrides() -> dict:
    doc = {}
    env = os.environ
    if _ENV_PREFIX + "SURFACE" in env:
        doc["surfaces"] = [s for s in env[_ENV_PREFIX + "SURFACE"].split(_ENV_LIST_SEP) if s.strip()]
    if _ENV_PREFIX + "CASES" in env:
        doc["cases"] = [s.strip() for s in env[_ENV_PREFIX + "CASES"].split(_ENV_LIST_SEP) if s.strip()]
    for key in ("MODE", "GRID", "OUT"):
        if _ENV_PREFIX + key in env:
            doc[key.lower()] = env[_ENV_PREFIX + key]
    if _ENV_PREFIX + "SEED" in env:
        try:
            doc["seed"] = int(env[_ENV_PREFIX + "SEED"])
        except ValueError:
            raise ConfigParse(f"{_ENV_PREFIX}SEED must be an integer") from None
    return doc


def _apply(cfg: RunConfig, doc: dict) -> None:
    if "surfaces" in doc and doc["surfaces"] is not None:
        if not isinstance(doc["surfaces"], list):
            raise ConfigParse("config key 'surfaces' must be a list of surface specs")
        cfg.surfaces = [str(s) for s in doc["surfaces"]]
    if "cases" in doc and doc["cases"] is not None:
        if not isinstance(doc["cases"], list):
            raise ConfigParse("config key 'cases' must be a list of glob patterns")
        cfg.cases = [str(s) for s in doc["cases"]]
    if "mode" in doc and doc["mode"] is not None:
        mode = str(doc["mode"])
        if mode not in MODES:
            raise ConfigParse(f"unknown mode {mode!r}; have {list(MODES)}")
        cfg.mode = mode
    if "grid" in doc and doc["grid"] is not None:
        raw = doc["grid"]
        cfg.grid = _parse_grid(",".join(raw) if isinstance(raw, list) else raw)
    if "out" in doc and doc["out"] is not None:
        cfg.out = str(doc["out"])
    if "seed" in doc and doc["seed"] is not None:
        if not isinstance(doc["seed"], int) or isinstance(doc["seed"], bool):
            raise ConfigParse("config key 'seed' must be an integer")
        cfg.seed = doc["seed"]


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        _apply(cfg, _load_config_file(args.config))
    _apply(cfg, _env_overrides())
    flag_doc: dict = {}
    if getattr(args, "surface", None):
        flag_doc["surfaces"] = args.surface
    if getattr(args, "cases", None):
        flag_doc["cases"] = args.cases
    for key in ("mode", "grid", "out"):
        val = getattr(args, key, None)
        if val is not None:
            flag_doc[key] = val
    if getattr(args, "seed", None) is not None:
        flag_doc["seed"] = args.seed
    _apply(cfg, flag_doc)
    if cfg.cases is not None:
        # an explicitly empty selection (--cases "") selects nothing, which is
        # different from the flag being absent (select everything)
        cfg.cases = [c for c in cfg.cases if c.strip()]
    return cfg


def _patches(cfg: RunConfig) -> list:
    names = cfg.surfaces if cfg.surfaces is not None else sorted(CATALOG)
    return [parse_surface(s) for s in names]


def _sanitize(x) -> Optional[float]:
    if x is None:
        return None
    x = float(x)
    return x if x == x and abs(x) != float("inf") else None


def _fmt(x, digits: int = 6) -> str:
    v = _sanitize(x)
    return "n/a" if v is None else f"{v:.{digits}e}"


def write_report_json(path: str, cfg: RunConfig, reports) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config_echo": cfg.echo(),
        "reports": [r.to_dict() for r in reports],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_summary_csv(path: str, reports) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "surface", "mode", "max_residual", "order", "verdict"])
        for r in reports:
            w.writerow([r.case_id, r.surface, r.mode,
                        _fmt(r.max_residual, 12),
                        "n/a" if r.order is None else f"{r.order:.4f}",
                        r.verdict])


def load_report(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigParse(
            f"report {path!r} has schema {version!r}; this build reads {SCHEMA_VERSION!r}")
    return doc


def merge_reports(*docs: dict) -> dict:
    versions = {d.get("schema_version") for d in docs}
    if versions != {SCHEMA_VERSION}:
        raise ConfigParse(f"refusing to merge reports across schemas {sorted(map(str, versions))}")
    merged = {"schema_version": SCHEMA_VERSION,
              "config_echo": [d.get("config_echo") for d in docs],
              "reports": []}
    for d in docs:
        merged["reports"].extend(d.get("reports", []))
    return merged


def _print_table(reports, out=None) -> None:
    out = sys.stdout if out is None else out
    if not reports:
        print("no cases selected", file=out)
        return
    wid = max(len(r.case_id) for r in reports)
    wsurf = max(len(r.surface) for r in reports)
    for r in reports:
        extra = ""
        if r.order is not None:
            extra = f"  order={r.order:.2f}"
        note = f"  [{r.reason}]" if r.verdict.startswith("SKIPPED") and r.reason else ""
        if r.expected == "report-only":
            note += "  (report-only)"
        print(f"{r.case_id:<{wid}}  {r.surface:<{wsurf}}  {r.mode:<8}  "
              f"{r.verdict:<25} max={_fmt(r.max_residual)}{extra}{note}", file=out)
    counts: dict = {}
    for r in reports:
        counts[r.verdict.split("(")[0]] = counts.get(r.verdict.split("(")[0], 0) + 1
    line = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))
    unexpected = sum(1 for r in reports
                     if r.verdict == "DISCREPANT" and r.expected == "CONFIRMED")
    print(f"-- {len(reports)} rows  ({line}); unexpected discrepancies: {unexpected}",
          file=out)


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    patches = _patches(cfg)
    env = RunEnv(grid=cfg.grid[-1], seed=cfg.seed)
    reports, failed = run_suite(
        patches, modes=(cfg.mode,), patterns=cfg.cases, env=env,
        explicit_surfaces=cfg.surfaces is not None)
    os.makedirs(cfg.out, exist_ok=True)
    write_report_json(os.path.join(cfg.out, "report.json"), cfg, reports)
    write_summary_csv(os.path.join(cfg.out, "summary.csv"), reports)
    _print_table(reports)
    return EXIT_DISCREPANT if failed else EXIT_OK


def _ladder_steps(patch: SurfacePatch, grids: list) -> list:
    rect = patch.sample_domain
    eu, ev = rect.extent
    return [STEP_PER_CELL * min(eu / nu, ev / nv) for nu, nv in grids]


def cmd_convergence(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    if not cfg.cases:
        raise ConfigParse("convergence needs exactly one case id (--cases)")
    picked = select_cases(cfg.cases)
    if len(picked) != 1:
        raise ConfigParse(
            f"convergence needs exactly one case; selection matched {[c.id for c in picked]}")
    case = picked[0]
    if case.kind != "pointwise":
        raise ConfigParse(f"case {case.id!r} is {case.kind}; convergence studies "
                          "need a pointwise case")
    patches = _patches(cfg)
    if len(patches) != 1:
        raise ConfigParse("convergence needs exactly one surface (--surface)")
    patch = patches[0]
    if patch.name not in case.surfaces:
        raise ConfigParse(f"case {case.id!r} does not apply to {patch.name!r}; "
                          f"it runs on {list(case.surfaces)}")
    if len(cfg.grid) < 3:
        raise ConfigParse("convergence needs a grid ladder of length >= 3 "
                          "(e.g. --grid 8x6,16x12,32x24)")
    for (nu0, nv0), (nu1, nv1) in zip(cfg.grid, cfg.grid[1:]):
        if not (nu1 > nu0 and nv1 >= nv0):
            raise ConfigParse("grid ladder must be strictly increasing")
    if cfg.mode not in case.modes:
        raise ConfigParse(f"case {case.id!r} does not run in mode {cfg.mode!r}")

    steps = _ladder_steps(patch, cfg.grid)
    rows = []
    for (nu, nv), h in zip(cfg.grid, steps):
        env = RunEnv(grid=(nu, nv), seed=cfg.seed, fd_ladder=(h,))
        rep = run_case(case, patch, cfg.mode, env)
        rows.append((h, rep.max_residual, rep.verdict))

    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, "convergence.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["h", "max_residual", "local_order"])
        prev = None
        import math as _math

        for h, res, _ in rows:
            if cfg.mode != "fd" or prev is None or not prev[1] or not res:
                order = "n/a"
            else:
                order = f"{_math.log2(prev[1] / res) / _math.log2(prev[0] / h):.4f}"
            w.writerow([f"{h:.8e}", _fmt(res, 12), order])
            prev = (h, res)
    with open(path, "r", encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK


def cmd_list_cases(args: argparse.Namespace) -> int:
    patterns = args.cases if getattr(args, "cases", None) else None
    for c in sorted(select_cases(patterns), key=lambda c: c.id):
        tags = f" [{c.expected}]" if c.expected != "CONFIRMED" else ""
        print(f"{c.id:<26} {c.kind:<9} modes={','.join(c.modes)}{tags}")
        print(f"{'':<26} on: {', '.join(c.surfaces)}")
        print(f"{'':<26} {c.summary}")
    return EXIT_OK


def cmd_list_surfaces(args: argparse.Namespace) -> int:
    for name in sorted(CATALOG):
        patch = parse_surface(name)
        params = ", ".join(
            f"{k}={v:g}" if isinstance(v, (int, float)) else f"{k}={v}"
            for k, v in patch.params) or "none"
        dom = patch.domain
        print(f"{name:<10} params: {params}")
        print(f"{'':<10} chart domain u in ({dom.u_min:g}, {dom.u_max:g}), "
              f"v in ({dom.v_min:g}, {dom.v_max:g})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beltrami",
        description="Audit the moving-frame identity catalog on parametric surfaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_grid=True):
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--surface", action="append", metavar="NAME[:k=v,...]",
                       help="catalog surface, repeatable (default: whole catalog)")
        p.add_argument("--cases", action="append", metavar="GLOB",
                       help="case id glob, repeatable (default: every case)")
        p.add_argument("--mode", choices=MODES,
                       help="derivative backend (default analytic)")
        if with_grid:
            p.add_argument("--grid", metavar="NUxNV[,NUxNV...]",
                           help="sampling grid, or a comma-separated ladder")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--seed", type=int, help="random-field seed (default 42)")

    p_verify = sub.add_parser("verify", help="run cases and write report.json/summary.csv")
    common(p_verify)
    p_verify.set_defaults(fn=cmd_verify)

    p_conv = sub.add_parser("convergence",
                            help="residuals of one pointwise case over a grid ladder")
    common(p_conv)
    p_conv.set_defaults(fn=cmd_convergence)

    p_lc = sub.add_parser("list-cases", help="print the case catalog")
    p_lc.add_argument("--cases", action="append", metavar="GLOB")
    p_lc.set_defaults(fn=cmd_list_cases)

    p_ls = sub.add_parser("list-surfaces", help="print the surface catalog")
    p_ls.set_defaults(fn=cmd_list_surfaces)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigParse as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnknownSurface as exc:
        print(f"unknown surface: {exc}", file=sys.stderr)
        return EXIT_SURFACE
    except UnknownCase as exc:
        print(f"unknown case: {exc}", file=sys.stderr)
        return EXIT_CASE
    except BeltramiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCREPANT


if __name__ == "__main__":
    sys.exit(main())
