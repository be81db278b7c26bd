"""Batch entry point: quotient assembly, homology, symbols, verification.

One command per process.  Reports are JSON (canonical) with optional CSV
projections, written atomically into the output directory.  Repeated
runs with the same configuration and version produce byte-identical
files; wall-clock timing is attached only when requested, precisely so
the default output stays reproducible.

Exit codes: 0 success, 2 structured computational error, 3 resource
ceiling exceeded.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from collections import namedtuple

from .errors import BtqError, CeilingExceeded, ComputationError
from .ffield import field
from .homology import bm_homology, cohomology, compact_support_cohomology, homology
from .quotient import QuotientParams, quotient_exhaustion, quotient_sidecar
from .modsym import (
    DEFAULT_POLICY, automorphic_csv, automorphic_export, homology_image,
    modular_symbol, span_json, span_test, symbol_json,
)

RunConfig = namedtuple("RunConfig", [
    "q", "d", "level", "alpha_max", "d_gen",
    "aut_ceiling", "enum_ceiling", "series_precision",
    "out_dir", "fmt", "timing", "criteria",
])

DEFAULTS = RunConfig(
    q=2, d=2, level=(1,), alpha_max=4, d_gen=DEFAULT_POLICY.entry_degree,
    aut_ceiling=10 ** 7, enum_ceiling=10 ** 6, series_precision=128,
    out_dir=".", fmt="json", timing=False, criteria=None,
)

# q^d caps the residue linear algebra; beyond this the tool is the
# wrong instrument, not merely slow
DIMENSION_BUDGET = 1 << 12


def _parse_level(text):
    if isinstance(text, (list, tuple)):
        coeffs = tuple(int(c) for c in text)
    else:
        coeffs = tuple(int(c) for c in str(text).split(","))
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    return coeffs


def validate_config(cfg):
    if cfg.q < 2:
        raise ComputationError("field size must be at least 2")
    if cfg.d < 2:
        raise ComputationError("dimension must be at least 2")
    if cfg.q ** cfg.d > DIMENSION_BUDGET:
        raise ComputationError(
            "q^d = %d exceeds the global budget %d"
            % (cfg.q ** cfg.d, DIMENSION_BUDGET))
    for name in ("aut_ceiling", "enum_ceiling", "series_precision"):
        if getattr(cfg, name) <= 0:
            raise ComputationError("%s must be positive" % name)
    if cfg.fmt not in ("json", "csv"):
        raise ComputationError("format must be json or csv")
    if cfg.criteria is not None and not cfg.criteria:
        raise ComputationError("empty criteria selection")
    return cfg


def config_from_file(path):
    with open(path) as fh:
        data = json.load(fh)
    return data


def build_config(args):
    data = {}
    if getattr(args, "config", None):
        data.update(config_from_file(args.config))
    for key in RunConfig._fields:
        flag = getattr(args, key, None)
        if flag is not None:
            data[key] = flag
    if "level" in data:
        data["level"] = _parse_level(data["level"])
    if "criteria" in data and data["criteria"] is not None:
        got = data["criteria"]
        if isinstance(got, str):
            got = [s for s in got.split(",") if s.strip()]
        data["criteria"] = tuple(int(x) for x in got)
    cfg = DEFAULTS._replace(**{k: v for k, v in data.items()
                               if k in RunConfig._fields})
    return validate_config(cfg)


def _params(cfg):
    return QuotientParams(field(cfg.q), cfg.d, level=cfg.level,
                          alpha_max=cfg.alpha_max,
                          aut_ceiling=cfg.aut_ceiling,
                          enum_ceiling=cfg.enum_ceiling)


def version_hash():
    """Digest of the package sources; pins reports to the code that made
    them without depending on install metadata."""
    here = os.path.dirname(os.path.abspath(__file__))
    h = hashlib.sha256()
    for name in sorted(os.listdir(here)):
        if name.endswith(".py"):
            with open(os.path.join(here, name), "rb") as fh:
                h.update(name.encode())
                h.update(fh.read())
    return h.hexdigest()[:12]


def config_echo(cfg):
    out = cfg._asdict()
    out["level"] = list(cfg.level)
    out["criteria"] = list(cfg.criteria) if cfg.criteria else None
    return out


def make_report(command, cfg, results, elapsed=None):
    return {
        "command": command,
        "config": config_echo(cfg),
        "results": results,
        "timing": ({"seconds": round(elapsed, 3)}
                   if cfg.timing and elapsed is not None else None),
        "version": version_hash(),
    }


def write_text(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_report(report, cfg, name):
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, name + "_report.json")
    write_text(path, json.dumps(report, sort_keys=True, indent=2) + "\n")
    return path


def _csv_escape(value):
    text = str(value)
    if "," in text or '"' in text:
        return '"%s"' % text.replace('"', '""')
    return text


def write_csv(cfg, name, header, rows):
    path = os.path.join(cfg.out_dir, name + ".csv")
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_escape(v) for v in row))
    write_text(path, "\n".join(lines) + "\n")
    return path


# -- commands -----------------------------------------------------------------


def cmd_quotient(cfg):
    t0 = time.time()
    P = _params(cfg)
    E = quotient_exhaustion(P)
    cores = []
    for a in E.grid:
        by_dim = {}
        for (dim, _key) in E.core(a):
            by_dim[dim] = by_dim.get(dim, 0) + 1
        cores.append({"alpha": a,
                      "core": {str(k): by_dim[k] for k in sorted(by_dim)}})
    slab = {str(dim): len(E.slab.keys(dim)) for dim in E.slab.dims()}
    complex_dump = {
        str(dim): {key: list(E.slab.record(dim, key).faces) if dim else []
                   for key in E.slab.keys(dim)}
        for dim in E.slab.dims()}
    results = {"cores": cores, "slab": slab}
    report = make_report("quotient", cfg, results, time.time() - t0)
    paths = [write_report(report, cfg, "quotient")]
    path = os.path.join(cfg.out_dir, "quotient_complex.json")
    write_text(path, json.dumps(complex_dump, sort_keys=True) + "\n")
    paths.append(path)
    path = os.path.join(cfg.out_dir, "quotient_sidecar.json")
    write_text(path, json.dumps(quotient_sidecar(E), sort_keys=True) + "\n")
    paths.append(path)
    if cfg.fmt == "csv":
        rows = [(c["alpha"], dim, n) for c in cores
                for dim, n in sorted(c["core"].items())]
        paths.append(write_csv(cfg, "quotient_cores",
                               ("alpha", "dim", "count"), rows))
    return report, paths


def cmd_homology(cfg):
    t0 = time.time()
    P = _params(cfg)
    E = quotient_exhaustion(P)
    deg = cfg.d - 1
    h = homology(E.slab, deg)
    ch = cohomology(E.slab, deg)
    bm = bm_homology(E, deg, cfg.alpha_max)
    cs = compact_support_cohomology(E, deg, cfg.alpha_max)
    results = {
        "degree": deg,
        "homology_dim": h.dimension,
        "cohomology_dim": ch.dimension,
        "bm": {"grid": list(bm.grid), "dims": list(bm.dims),
               "transition_ranks": list(bm.transition_ranks),
               "stabilized": bm.stabilized, "dimension": bm.dimension},
        "compact_support": {"grid": list(cs.grid), "dims": list(cs.dims),
                            "stabilized": cs.stabilized,
                            "dimension": cs.dimension},
        "uct_ok": h.dimension == ch.dimension,
        "duality_ok": bm.dimension == cs.dimension,
    }
    report = make_report("homology", cfg, results, time.time() - t0)
    paths = [write_report(report, cfg, "homology")]
    if cfg.fmt == "csv":
        rows = [(a, dim) for a, dim in zip(bm.grid, bm.dims)]
        paths.append(write_csv(cfg, "homology_bm_dims",
                               ("alpha", "dim"), rows))
    return report, paths


def _load_bases(path):
    """Bases from JSON: {"bases": [...]} or a list of matrices, or one
    matrix of integer constants.  A single matrix with polynomial
    entries is ambiguous and must be wrapped in a list."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["bases"]
    if not isinstance(data, list) or not data:
        raise ComputationError("basis file must hold a nonempty list")
    if isinstance(data[0][0], int):
        data = [data]

    def entry(e):
        if isinstance(e, int):
            return e
        if isinstance(e, list) and len(e) == 2 \
                and all(isinstance(x, list) for x in e):
            return (tuple(e[0]), tuple(e[1]))
        return tuple(e)

    return [tuple(tuple(entry(e) for e in row) for row in V) for V in data]


def cmd_modsym(cfg, basis_path):
    t0 = time.time()
    P = _params(cfg)
    bases = _load_bases(basis_path)
    if not bases:
        raise ComputationError("basis file holds no bases")
    alpha = cfg.alpha_max
    E = quotient_exhaustion(P)
    symbols = []
    tables = []
    for V in bases:
        sym = modular_symbol(V, P, alpha)
        symbols.append(symbol_json(sym))
        tables.append(automorphic_export(sym, P, alpha, E=E))
    cert = span_test(P, alpha, policy=cfg.d_gen, E=E)
    results = {"alpha": alpha, "symbols": symbols, "span": span_json(cert)}
    report = make_report("modsym", cfg, results, time.time() - t0)
    paths = [write_report(report, cfg, "modsym")]
    for i, table in enumerate(tables):
        path = os.path.join(cfg.out_dir, "automorphic_%d.csv" % i)
        write_text(path, automorphic_csv(table))
        paths.append(path)
    return report, paths


def cmd_verify(cfg):
    from . import acceptance
    t0 = time.time()
    selection = cfg.criteria or tuple(range(1, 12))
    results = []
    for n in selection:
        out = acceptance.run_criterion(n, cfg)
        results.append(out)
        line = "criterion %2d: %s — %s" % (
            n, "pass" if out["passed"] else "FAIL", out["summary"])
        print(line)
        for finding in out.get("findings", ()):
            print("    finding: %s" % finding)
    payload = {"criteria": results,
               "all_passed": all(r["passed"] for r in results)}
    report = make_report("verify", cfg, payload, time.time() - t0)
    paths = [write_report(report, cfg, "verify")]
    if cfg.fmt == "csv":
        rows = [(r["criterion"], "pass" if r["passed"] else "fail",
                 r["summary"]) for r in results]
        paths.append(write_csv(cfg, "verify_criteria",
                               ("criterion", "status", "summary"), rows))
    return report, paths


# -- argument plumbing -----------------------------------------------------------


def make_parser():
    parser = argparse.ArgumentParser(
        prog="btq",
        description="Quotient complexes, homology, and modular symbols "
                    "for lattice chains over a rational function field.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with RunConfig fields")
        p.add_argument("--q", type=int, help="residue field size")
        p.add_argument("--d", type=int, help="lattice rank")
        p.add_argument("--level", help="level polynomial, ascending "
                                       "coefficients, e.g. 0,1 for t")
        p.add_argument("--alpha-max", dest="alpha_max", type=int,
                       help="largest truncation parameter")
        p.add_argument("--d-gen", dest="d_gen", type=int,
                       help="generator entry degree for the span test")
        p.add_argument("--aut-ceiling", dest="aut_ceiling", type=int)
        p.add_argument("--enum-ceiling", dest="enum_ceiling", type=int)
        p.add_argument("--series-precision", dest="series_precision",
                       type=int)
        p.add_argument("--out", dest="out_dir", help="output directory")
        p.add_argument("--format", dest="fmt", choices=("json", "csv"))
        p.add_argument("--timing", action="store_const", const=True,
                       default=None, help="attach wall-clock timing "
                       "(breaks byte-identity of reports)")

    p = sub.add_parser("quotient", help="assemble truncated cores")
    common(p)
    p = sub.add_parser("homology", help="homology and duality report")
    common(p)
    p = sub.add_parser("modsym", help="modular symbols and span test")
    common(p)
    p.add_argument("basis_file", help="JSON file with one basis matrix "
                                      "or a list of them")
    p = sub.add_parser("verify", help="run acceptance criteria")
    common(p)
    p.add_argument("--criteria", help="comma list, e.g. 1,2,3 (default all)")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "quotient":
            report, paths = cmd_quotient(cfg)
        elif args.command == "homology":
            report, paths = cmd_homology(cfg)
        elif args.command == "modsym":
            report, paths = cmd_modsym(cfg, args.basis_file)
        elif args.command == "verify":
            report, paths = cmd_verify(cfg)
        else:
            raise ComputationError("unknown command %r" % (args.command,))
    except CeilingExceeded as e:
        print("ceiling exceeded: %s" % e, file=sys.stderr)
        return 3
    except BtqError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    if args.command == "verify" \
            and not report["results"]["all_passed"]:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
