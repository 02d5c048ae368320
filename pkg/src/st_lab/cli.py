"""``st-lab`` command line.

Every JSON document written here carries a ``manifest`` block recording
the subcommand, its parameters (as strings), the input/output paths, the
tool version and the seed.  Output is canonical JSON so a rerun of the
same command produces the same bytes.

Exit codes: 0 success, 1 runtime failure or regression, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .exact import parse_rational
from .generators import GeneratorSpec
from .geometry import Configuration, GeometryError
from .incidence import clean, count_incidences, st_ratio
from .partition import DEFAULT_EPSILON, PartitionTree, all_line_crossings, build_partition
from .recovery import PipelineParams, closure, run_pipeline
from .report import RunManifest, SchemaMismatch, compare_baseline, dumps, read_json, write_json
from .rigidity import (
    collinearity_matrix,
    dgos_hypotheses,
    dual_rigidity_transfer,
    projective_kernel_check,
    rigidity_certificate,
)
from .triples import TripleSystem, consecutive_triples, in_cell_triples, triple_peel

# argparse dest names that are paths or plumbing, not parameters
_INPUT_KEYS = ("config", "triples_path", "cells", "report_path", "baseline", "seeds_file")
_OUTPUT_KEYS = ("output", "report")
_SKIP = {"command", "generator", "func"}


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _id_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated ids: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="st-lab", description="Exact incidence geometry and rigidity certificates.")
    parser.add_argument("--version", action="version", version=f"st-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    gen = sub.add_parser("gen", help="write a benchmark configuration")
    gsub = gen.add_subparsers(dest="generator", required=True, metavar="KIND")
    g = gsub.add_parser("elekes", help="Elekes grid")
    g.add_argument("--n", type=int, required=True, help="grid parameter N")
    g.add_argument("-o", "--output")
    g = gsub.add_parser("unbalanced", help="grid [1..N] x [1..sN^2]")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--s", type=int, required=True)
    g.add_argument("-o", "--output")
    g = gsub.add_parser("random", help="random points and lines through pairs")
    g.add_argument("--points", type=int, required=True)
    g.add_argument("--lines", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g = gsub.add_parser("circle", help="rational points on the unit circle")
    g.add_argument("--points", type=int, required=True)
    g.add_argument("-o", "--output")

    p = sub.add_parser("count", help="count incidences")
    p.add_argument("config")
    p.add_argument("--method", choices=("naive", "grouped"), default="grouped")
    p.add_argument("-o", "--output")

    p = sub.add_parser("clean", help="peel poor points and lines")
    p.add_argument("config")
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("-o", "--output", help="cleaned configuration")
    p.add_argument("--report", help="cleaning report")

    p = sub.add_parser("triples", help="consecutive collinear triples")
    p.add_argument("config")
    p.add_argument("--cells", help="partition tree JSON (or a bare label map) restricting to in-cell triples")
    p.add_argument("--peel", type=_rational, help="peel points lying in fewer triples than this")
    p.add_argument("-o", "--output")

    p = sub.add_parser("partition", help="build a bisecting polynomial partition")
    p.add_argument("config")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--epsilon", type=_rational, default=DEFAULT_EPSILON)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")

    p = sub.add_parser("rigidity", help="rigidity certificate for a triple system")
    p.add_argument("config")
    p.add_argument("--triples", dest="triples_path", required=True)
    p.add_argument("--report")

    p = sub.add_parser("recover", help="determination closure from seed points and lines")
    p.add_argument("config")
    p.add_argument("--seed-points", type=_id_list, default=[])
    p.add_argument("--seed-lines", type=_id_list, default=[])
    p.add_argument("-o", "--output")

    defaults = PipelineParams()
    p = sub.add_parser("pipeline", help="full recovery pipeline")
    p.add_argument("config")
    p.add_argument("--delta", type=_rational, default=defaults.delta)
    p.add_argument("--c2", type=_rational, default=defaults.c2)
    p.add_argument("--c3", type=_rational, default=None, help="selection constant (default: same as --c2)")
    p.add_argument("--peel", type=_rational, default=None, help="per-cell peel threshold (default: derived per cell)")
    p.add_argument("--k", type=int, default=defaults.k)
    p.add_argument("--levels", type=int, default=None, help="partition levels (default: derived)")
    p.add_argument("--epsilon", type=_rational, default=defaults.epsilon)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.add_argument("--orientation", choices=("auto", "primal", "dual"), default=defaults.orientation)
    p.add_argument("-o", "--output")

    p = sub.add_parser("compare", help="compare a pipeline report against a baseline")
    p.add_argument("report_path", metavar="report")
    p.add_argument("baseline")
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--abs-tol", type=float, default=0.0)
    p.add_argument("-o", "--output")
    return parser


def _manifest(ns: argparse.Namespace) -> RunManifest:
    values = vars(ns)
    params: dict[str, str] = {}
    inputs, outputs = [], []
    for key in sorted(values):
        val = values[key]
        if key in _SKIP:
            continue
        if key in _INPUT_KEYS:
            if val is not None:
                inputs.append(str(val))
        elif key in _OUTPUT_KEYS:
            if val is not None:
                outputs.append(str(val))
        elif isinstance(val, list):
            params[key] = ",".join(str(v) for v in val)
        else:
            params[key] = "auto" if val is None else str(val)
    if ns.command == "gen":
        params["kind"] = ns.generator
    seed = values.get("seed")
    return RunManifest(ns.command, params, inputs, outputs, __version__, seed if isinstance(seed, int) else None)


def parse_cli(argv=None) -> RunManifest:
    """Validate ``argv``; usage errors exit with status 2."""
    return _manifest(build_parser().parse_args(argv))


def _emit(obj: dict, path: str | None, manifest: RunManifest) -> None:
    obj = dict(obj)
    obj["manifest"] = manifest.to_json_obj()
    if path:
        write_json(path, obj)
    else:
        sys.stdout.write(dumps(obj))


def _cmd_gen(ns, man):
    if ns.generator == "elekes":
        spec = GeneratorSpec("elekes", {"N": ns.n})
    elif ns.generator == "unbalanced":
        spec = GeneratorSpec("unbalanced", {"N": ns.n, "s": ns.s})
    elif ns.generator == "random":
        spec = GeneratorSpec("random", {"n": ns.points, "m": ns.lines}, ns.seed)
    else:
        spec = GeneratorSpec("circle", {"n": ns.points})
    _emit(spec.build().to_json_obj(), ns.output, man)
    return 0


def _cmd_count(ns, man):
    config = Configuration.load(ns.config)
    stats = count_incidences(config, ns.method)
    obj = {
        "n": config.n,
        "m": config.m,
        "method": ns.method,
        "incidences": stats.total,
        "max_point_richness": max(stats.per_point_richness, default=0),
        "max_line_richness": max(stats.per_line_richness, default=0),
    }
    if config.n and config.m:
        obj["ratio_main"], obj["ratio_full"] = st_ratio(config, stats.total)
    _emit(obj, ns.output, man)
    return 0


def _cmd_clean(ns, man):
    config = Configuration.load(ns.config)
    rep = clean(config, ns.delta)
    cleaned = config.subconfiguration(sorted(rep.surviving_points), sorted(rep.surviving_lines))
    if ns.output:
        _emit(cleaned.to_json_obj(), ns.output, man)
    if ns.report or not ns.output:
        _emit(rep.to_json_obj(), ns.report, man)
    return 0


def _load_labels(path: str) -> dict:
    obj = read_json(path)
    if "levels" in obj and "cell_of" in obj:
        return PartitionTree.from_json_obj(obj).cell_of
    labels = obj.get("labels", obj)
    return {int(k): v for k, v in labels.items()}


def _cmd_triples(ns, man):
    config = Configuration.load(ns.config)
    if ns.cells:
        triples = in_cell_triples(config, _load_labels(ns.cells))
    else:
        triples = consecutive_triples(config)
    obj = triples.to_json_obj()
    if ns.peel is not None:
        rep = triple_peel(range(config.n), triples, ns.peel)
        obj = rep.surviving_triples.to_json_obj()
        obj["peel"] = {"threshold": str(rep.threshold), "rounds": rep.rounds, "surviving": len(rep.surviving)}
    _emit(obj, ns.output, man)
    return 0


def _cmd_partition(ns, man):
    config = Configuration.load(ns.config)
    tree = build_partition(config, ns.levels, ns.epsilon, ns.seed)
    obj = tree.to_json_obj()
    crossings = all_line_crossings(tree, config)
    obj["max_line_crossings"] = max(crossings, default=0)
    obj["total_degree"] = tree.total_degree
    _emit(obj, ns.output, man)
    return 0


def _cmd_rigidity(ns, man):
    config = Configuration.load(ns.config)
    triples = TripleSystem.from_json_obj(read_json(ns.triples_path))
    if triples.kind == "concurrent":
        obj = dual_rigidity_transfer(config, triples).to_json_obj()
    else:
        cert = rigidity_certificate(config, triples)
        obj = cert.to_json_obj()
        kernel = projective_kernel_check(config, collinearity_matrix(config, triples))
        obj["projective_span_rank"] = kernel.span_rank
        hyp = dgos_hypotheses(config, triples)
        obj["dgos"] = hyp.to_json_obj()
        if hyp.holds:
            obj["dgos"]["bound"] = hyp.bound(cert.ground_size)
    _emit(obj, ns.report, man)
    return 0


def _cmd_recover(ns, man):
    config = Configuration.load(ns.config)
    for i in ns.seed_points:
        if not 0 <= i < config.n:
            raise GeometryError(f"unknown point id {i}")
    for j in ns.seed_lines:
        if not 0 <= j < config.m:
            raise GeometryError(f"unknown line id {j}")
    state = closure(config, ns.seed_points, ns.seed_lines)
    obj = state.to_json_obj()
    obj["new_points"] = sorted(state.determined_points - set(ns.seed_points))
    obj["new_lines"] = sorted(state.determined_lines - set(ns.seed_lines))
    _emit(obj, ns.output, man)
    return 0


def _cmd_pipeline(ns, man):
    config = Configuration.load(ns.config)
    params = PipelineParams(
        delta=ns.delta, c2=ns.c2, c3=ns.c3, peel=ns.peel, k=ns.k, levels=ns.levels,
        epsilon=ns.epsilon, seed=ns.seed, orientation=ns.orientation,
    )
    report = run_pipeline(config, params)
    _emit(report, ns.output, man)
    return 0 if report.get("status") == "ok" else 1


def _cmd_compare(ns, man):
    diff = compare_baseline(read_json(ns.report_path), read_json(ns.baseline), ns.rel_tol, ns.abs_tol)
    _emit(diff.to_json_obj(), ns.output, man)
    return 0 if diff.ok else 1


COMMANDS = {
    "gen": _cmd_gen,
    "count": _cmd_count,
    "clean": _cmd_clean,
    "triples": _cmd_triples,
    "partition": _cmd_partition,
    "rigidity": _cmd_rigidity,
    "recover": _cmd_recover,
    "pipeline": _cmd_pipeline,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    man = _manifest(ns)
    try:
        return COMMANDS[ns.command](ns, man)
    except (OSError, ValueError, KeyError, RuntimeError, SchemaMismatch) as exc:
        print(f"st-lab {ns.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
