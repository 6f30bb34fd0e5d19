"""Command-line front end.

Every run echoes its fully resolved run specification (defaults filled in)
into the output header, all randomness flows from a single --seed with a
recorded default, and output is byte-identical for identical specifications.

Exit codes: 0 success, 1 usage error, 2 contract violation, 3 size-cap error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import (ENGINE_VERSION, certifier, cutset_lab, exact_engine, fan,
               graph_core, monte_carlo)
from .errors import ContractError, SizeCapError
from .graph_core import EdgeCutset, VertexCutset, VertexSet

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Graph resolution

def load_patch(desc: str, radius: int):
    """Resolve --graph: line | grid2d | tree:<branching> | fan:<N> | a file path."""
    if desc == "line":
        return graph_core.gen_line(radius)
    if desc == "grid2d":
        return graph_core.gen_grid2d(radius)
    if desc.startswith("tree:"):
        return graph_core.gen_tree(int(desc.split(":", 1)[1]), radius)
    if desc.startswith("fan:"):
        return fan.fan_patch(int(desc.split(":", 1)[1])).patch
    try:
        with open(desc) as fh:
            return graph_core.patch_from_text(fh.read())
    except FileNotFoundError:
        raise ContractError(f"graph file not found: {desc}")


def patch_family(desc: str):
    """A radius -> Patch callable for certify's growing-patch bisection."""
    def make(r):
        return load_patch(desc, r)
    return make


def resolve_vertex(patch, spec: str) -> int:
    """A vertex given as a label (when the patch has labels) or a raw index."""
    index = patch.label_index()
    for key in (_maybe_int(spec), _maybe_tuple(spec)):
        if key is not None and key in index:
            return index[key]
    try:
        v = int(spec)
    except ValueError:
        raise ContractError(f"cannot resolve vertex {spec!r}")
    if not 0 <= v < patch.graph.n:
        raise ContractError(f"vertex index {v} out of range")
    return v


def _maybe_int(s: str):
    try:
        return int(s)
    except ValueError:
        return None


def _maybe_tuple(s: str):
    parts = s.split(",")
    if len(parts) == 2:
        try:
            return (int(parts[0]), int(parts[1]))
        except ValueError:
            return None
    return None


def resolve_set(patch, spec: str) -> VertexSet:
    """--set as a label range "a..b" (labelled patches) or comma list of vertices."""
    if ".." in spec:
        a, b = spec.split("..", 1)
        lo, hi = int(a), int(b)
        index = patch.label_index()
        members = [index[c] for c in range(lo, hi + 1) if c in index]
        if len(members) != hi - lo + 1:
            raise ContractError(f"label range {spec} not fully on the patch")
        return VertexSet(members)
    return VertexSet(resolve_vertex(patch, tok) for tok in spec.split(","))


def parse_edges(spec: str):
    """Edges as "u-v,u-v,..." in vertex indices."""
    out = []
    for tok in spec.split(","):
        u, v = tok.split("-", 1)
        out.append((int(u), int(v)))
    return out


def parse_grid(args) -> list[float]:
    if args.p_grid:
        return [float(t) for t in args.p_grid.split(",")]
    return [args.p]


# ---------------------------------------------------------------------------
# Output plumbing

def emit(args, spec: dict, payload, csv_text: str | None = None):
    """JSON carries the resolved spec inline; CSV puts it in comment lines."""
    if args.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "engine_version": ENGINE_VERSION,
               "run_spec": spec, "result": payload}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        if csv_text is None:
            raise ContractError(
                f"subcommand {spec['subcommand']!r} has no CSV form; use --format json")
        header = "".join(f"# {k}={spec[k]}\n" for k in sorted(spec))
        text = f"# schema_version={SCHEMA_VERSION}\n{header}{csv_text}"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def base_spec(args, sub: str) -> dict:
    spec = {"subcommand": sub, "seed": args.seed, "format": args.format,
            "determinism": True, "threads": 1}
    for name in ("graph", "radius", "p", "p_grid", "samples", "v", "set",
                 "p_lo", "p_hi", "epsilon0", "budget", "radii", "kind", "cut",
                 "op", "N", "exact"):
        if hasattr(args, name) and getattr(args, name) is not None:
            spec[name] = getattr(args, name)
    return spec


# ---------------------------------------------------------------------------
# Subcommands

def cmd_phi(args):
    patch = load_patch(args.graph, args.radius)
    s = resolve_set(patch, args.set)
    v = resolve_vertex(patch, args.v)
    rep = exact_engine.phi(patch, s, v, args.p)
    emit(args, base_spec(args, "phi"), rep.to_dict())
    return 0


def cmd_certify(args):
    radii = ([int(t) for t in args.radii.split(",")] if args.radii
             else [args.radius])
    out = certifier.certify_bisect(
        patch_family(args.graph), None, args.p_lo, args.p_hi,
        tol=args.tol, epsilon0=args.epsilon0, budget=args.budget,
        radii=radii, seed=args.seed, samples=args.samples)
    payload = {"certified_p": out["certified_p"],
               "certificate": out["certificate"].to_dict()}
    emit(args, base_spec(args, "certify"), payload)
    return 0


def cmd_mc(args):
    patch = load_patch(args.graph, args.radius)
    v = resolve_vertex(patch, args.v)
    if args.set:
        s = resolve_set(patch, args.set)
        rep = monte_carlo.mc_phi(patch, s, v, args.p, args.samples,
                                 seed=args.seed)
        payload = {"total": rep["total"], "total_stderr": rep["total_stderr"],
                   "degenerate": rep["degenerate"],
                   "terms": {str(y): {"mean": e.mean, "stderr": e.stderr}
                             for y, e in sorted(rep["terms"].items())}}
        emit(args, base_spec(args, "mc"), payload)
        return 0
    event = monte_carlo.FrontierConn(v)
    est = monte_carlo.mc_event_prob(patch, event, args.p, args.samples,
                                    seed=args.seed)
    payload = {"event": event.describe(), "mean": est.mean,
               "stderr": est.stderr, "samples": est.samples}
    emit(args, base_spec(args, "mc"), payload,
         csv_text=monte_carlo.estimates_csv([(event, args.p, est)]))
    return 0


def cmd_cutsum(args):
    patch = load_patch(args.graph, args.radius)
    x = resolve_vertex(patch, args.v)
    if args.kind == "vertex":
        cut = VertexCutset(resolve_vertex(patch, t) for t in args.cut.split(","))
    else:
        cut = EdgeCutset(parse_edges(args.cut))
    reports = [cutset_lab.cut_sum(patch, x, cut, p, samples=args.samples,
                                  seed=args.seed)
               for p in parse_grid(args)]
    emit(args, base_spec(args, "cutsum"), [r.to_dict() for r in reports],
         csv_text=cutset_lab.cut_sums_csv(reports))
    return 0


def cmd_infcut(args):
    patch = load_patch(args.graph, args.radius)
    x = resolve_vertex(patch, args.v)
    payload = []
    reports = []
    for p in parse_grid(args):
        out = cutset_lab.inf_cut_sum(patch, x, args.kind, p)
        reports.append(out["report"])
        payload.append({"p": p, "min_total": out["min_total"],
                        "argmin_cut": out["report"].to_dict()["cut_members"],
                        "family": out["family"]})
    emit(args, base_spec(args, "infcut"), payload,
         csv_text=cutset_lab.cut_sums_csv(reports))
    return 0


def cmd_russo(args):
    patch = load_patch(args.graph, args.radius)
    v = resolve_vertex(patch, args.v)
    payload = exact_engine.russo_check(patch, v, args.p)
    emit(args, base_spec(args, "russo"), payload)
    return 0


def cmd_fan(args):
    if args.op == "verify34":
        report = fan.verify_theorem34(args.N, parse_grid(args))
        payload = {k: report[k] for k in
                   ("N", "num_cutsets", "violations_quoted",
                    "violations_endpoint")}
        payload["rows"] = report["rows"]
        for row in payload["rows"]:
            row["cut"] = [list(e) for e in row["cut"]]
        emit(args, base_spec(args, "fan"), payload,
             csv_text=fan.verify_csv(report))
        return 0
    if args.op == "conn":
        rows = [(args.N, fan.black_conn_exact(args.N, p))
                for p in parse_grid(args)]
        payload = [{"n": n, "conn_prob": v} for n, v in rows]
        emit(args, base_spec(args, "fan"), payload,
             csv_text=fan.trend_csv(rows))
        return 0
    raise ContractError(f"unknown fan op {args.op!r}")


def cmd_trend(args):
    rows = fan.pc_trend(args.p, range(1, args.N + 1))
    payload = [{"n": n, "conn_prob": v} for n, v in rows]
    emit(args, base_spec(args, "trend"), payload, csv_text=fan.trend_csv(rows))
    return 0


# ---------------------------------------------------------------------------
# Parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(sp, graph_default=None):
    sp.add_argument("--graph", default=graph_default,
                    required=graph_default is None,
                    help="line | grid2d | tree:<b> | fan:<N> | patch file path")
    sp.add_argument("--radius", type=int, default=4,
                    help="generator radius / tree depth")
    sp.add_argument("--seed", type=lambda s: int(s, 0),
                    default=monte_carlo.DEFAULT_SEED,
                    help="master seed (recorded default, not entropy)")
    sp.add_argument("--samples", type=int, default=monte_carlo.DEFAULT_SAMPLES)
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.add_argument("--threads", type=int, default=1,
                    help="accepted for forward compatibility; runs are "
                         "single-threaded fixed-order")


def build_parser() -> _Parser:
    ap = _Parser(prog="cutperc",
                 description="percolation threshold functionals, certificates "
                             "and cutset sums")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("phi", help="boundary functional of a set")
    _add_common(p)
    p.add_argument("--set", required=True,
                   help="label range a..b or comma list of vertices")
    p.add_argument("--v", required=True, help="center vertex (label or index)")
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(fn=cmd_phi)

    p = sub.add_parser("certify", help="largest certifiable p by bisection")
    _add_common(p)
    p.add_argument("--p-lo", dest="p_lo", type=float, required=True)
    p.add_argument("--p-hi", dest="p_hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--epsilon0", type=float, default=certifier.DEFAULT_EPSILON0)
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--radii", default=None,
                   help="comma list of radii to try (default: --radius only)")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("mc", help="Monte Carlo estimate of an event or phi")
    _add_common(p)
    p.add_argument("--v", required=True)
    p.add_argument("--set", default=None,
                   help="if given, estimate phi of this set; else the frontier "
                        "connection of --v")
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(fn=cmd_mc)

    p = sub.add_parser("cutsum", help="cut-sum of an explicit cutset")
    _add_common(p)
    p.add_argument("--v", required=True, help="source vertex x")
    p.add_argument("--kind", choices=("vertex", "edge"), required=True)
    p.add_argument("--cut", required=True,
                   help="vertex list v1,v2,... or edge list u-v,u-v,...")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--p-grid", dest="p_grid", default=None)
    p.set_defaults(fn=cmd_cutsum)

    p = sub.add_parser("infcut", help="minimum cut-sum over minimal cutsets")
    _add_common(p)
    p.add_argument("--v", required=True, help="source vertex x")
    p.add_argument("--kind", choices=("vertex", "edge"), required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--p-grid", dest="p_grid", default=None)
    p.set_defaults(fn=cmd_infcut)

    p = sub.add_parser("russo", help="pivotal-sum derivative check")
    _add_common(p)
    p.add_argument("--v", required=True)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(fn=cmd_russo)

    p = sub.add_parser("fan", help="fan-graph checks")
    _add_common(p, graph_default="fan")
    p.add_argument("--op", choices=("verify34", "conn"), required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--p-grid", dest="p_grid", default=None)
    p.set_defaults(fn=cmd_fan)

    p = sub.add_parser("trend", help="fan connection probability against depth")
    _add_common(p, graph_default="fan")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(fn=cmd_trend)

    return ap


def _join_dash_values(argv):
    """Fold "--set -2..2" into "--set=-2..2" so argparse does not read the
    negative-label value as a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--set", "--v", "--cut") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_join_dash_values(list(argv)))
    if getattr(args, "p", None) is None and getattr(args, "p_grid", None) is None \
            and args.subcommand in ("cutsum", "infcut", "fan"):
        print("error: one of --p / --p-grid is required", file=sys.stderr)
        return 1
    try:
        return args.fn(args)
    except SizeCapError as exc:
        print(f"size-cap error: {exc}", file=sys.stderr)
        return 3
    except ContractError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
