"""
Command-Line Frontend

Batch access to every fusionkit module over CSV/JSON/text files. Results are
written as canonical JSON (sorted keys, fixed significant digits) or as a
lossy CSV listing. Exit codes: 0 success, 1 usage or input error, 2 when a
computation finishes with a non-optimal or non-converged status.
"""

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from . import characteristics, core, exemplar, fitting, informetric, integrals, multivariate, strings
from .errors import FusionError, InputFormatError, SolverError
from .fusion_config import get_fusion_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2

# callback metrics are Python-only
POINT_METRICS = tuple(k.value for k in multivariate.MetricKind if k is not multivariate.MetricKind.CALLBACK)


class UsageError(Exception):
    """Bad command line"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class CommandFailed(Exception):
    """Computation finished but its status is not acceptable; carries the partial result"""

    def __init__(self, message: str, result: Dict[str, Any]):
        super().__init__(message)
        self.result = result


# ---------------------------------------------------------------------------
# Output


def _format_float(x: float, digits: int) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == int(x) and abs(x) < 1e16:
        return f"{int(x)}.0"
    return format(x, f".{digits}g")


def canonical_json(obj: Any, digits: int = 17) -> str:
    """JSON with sorted keys and floats printed to a fixed number of significant digits"""
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {canonical_json(v, digits)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(canonical_json(v, digits) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return canonical_json(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj), digits)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _flatten(prefix: str, value: Any, out: List[List[str]]) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    elif isinstance(value, (list, tuple, np.ndarray)):
        items = list(np.asarray(value, dtype=object).ravel()) if isinstance(value, np.ndarray) else list(value)
        out.append([prefix] + [repr(v) if isinstance(v, float) else str(v) for v in items])
    else:
        out.append([prefix, str(value)])


def _to_csv(document: Dict[str, Any]) -> str:
    rows: List[List[str]] = []
    _flatten("", document, rows)
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Input helpers


def _digest(paths: Sequence[str], extra: Sequence[str] = ()) -> str:
    h = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as f:
            h.update(f.read())
    for item in extra:
        h.update(item.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()


def _read_vectors(path: str) -> List[np.ndarray]:
    """One numeric vector per CSV row"""
    vectors = []
    with open(path, newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            cells = [c for c in row if c.strip() != ""]
            if not cells:
                continue
            values = []
            for col, cell in enumerate(cells, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise InputFormatError(f"Not a number: '{cell}'", line=lineno, column=col)
            vectors.append(np.array(values))
    if not vectors:
        raise InputFormatError(f"No data rows in {path}")
    return vectors


def _floats(text: Optional[str], what: str) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(f"--{what} expects comma-separated numbers")


def _need_seed(args) -> int:
    seed = args.seed if args.seed is not None else get_fusion_config().get_default_seed()
    if seed is None:
        raise UsageError(f"'{args.command}' is stochastic and requires --seed")
    args.seed = int(seed)
    return args.seed


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


# ---------------------------------------------------------------------------
# Commands


def cmd_aggregate(args) -> Dict[str, Any]:
    vectors = _read_vectors(args.input)
    kind = args.kind
    weights = _floats(args.weights, "weights")
    if kind == "owa":
        fn = lambda x: core.owa(_need(weights, "--weights"), x)
    elif kind == "wqam":
        fn = lambda x: core.wqam(core.get_generator(args.phi, args.param), _need(weights, "--weights"), x)
    elif kind == "wam":
        fn = lambda x: float(np.dot(core.as_weights(_need(weights, "--weights"), x.size), x))
    elif kind == "trimmed":
        fn = lambda x: core.trimmed_mean(int(_need(args.k, "--k")), x)
    elif kind == "winsorized":
        fn = lambda x: core.winsorized_mean(int(_need(args.k, "--k")), x)
    elif kind == "quantile":
        fn = lambda x: core.quantile(args.qtype, _need(args.alpha, "--alpha"), x)
    elif kind == "extended_owa":
        fn = lambda x: core.extended_owa(args.triangle, x)
    else:
        spec = core.MeanSpec.parse(kind)
        fn = lambda x: core.aggregate(spec, x)
    return {"kind": kind, "values": [fn(x) for x in vectors]}


INTEGRAL_FNS = {"choquet": integrals.choquet, "sugeno": integrals.sugeno, "shilkret": integrals.shilkret}


def cmd_integral(args) -> Dict[str, Any]:
    with open(args.measure, encoding="utf-8") as f:
        text = f.read()
    try:
        mu = integrals.MonotoneMeasure.from_json(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(f"Invalid measure JSON: {e.msg}", line=e.lineno, column=e.colno)
    fn = INTEGRAL_FNS[args.type]
    return {"type": args.type, "values": [fn(mu, x) for x in _read_vectors(args.input)]}


def cmd_fit(args) -> Dict[str, Any]:
    data = fitting.FitData.from_csv(args.input)
    method = args.method
    extra: Dict[str, Any] = {}
    if method in ("wam-lse", "wam-lad", "wam-lmd"):
        result = fitting.fit_wam(data, method.split("-")[1])
    elif method == "wam-rank":
        result = fitting.fit_wam_rank(data, args.criterion, _need(args.p, "--p"))
    elif method == "wam-reg":
        result = fitting.fit_wam_regularized(data, _need(args.lam, "--lambda"))
    elif method == "wqam":
        gen = core.get_generator(args.phi, args.param)
        if args.criterion == "lad":
            result = fitting.fit_wqam_lad(data, gen, seed=_need_seed(args))
        elif args.linearized:
            result = fitting.fit_wqam_linearized(data, gen, args.criterion)
        else:
            result = fitting.fit_wqam_lse(data, gen)
    else:
        p_star, result = fitting.fit_powmean(data, args.p_min, args.p_max, tol=args.tol)
        extra["p"] = p_star
    out = result.to_dict()
    out.update(extra)
    if not result.converged:
        raise CommandFailed(f"fit did not converge: {result.message}", out)
    return out


def cmd_depth(args) -> Dict[str, Any]:
    cloud = multivariate.PointCloud.from_csv(args.input, header=args.header)
    y = _need(_floats(args.point, "point"), "--point")
    if args.kind == "tukey":
        if args.mode == "mc":
            value = multivariate.tukey_depth(y, cloud, mode="mc", m=args.m, seed=_need_seed(args))
        else:
            value = multivariate.tukey_depth(y, cloud)
    elif args.kind == "liu":
        value = multivariate.liu_depth(y, cloud)
    else:
        value = multivariate.oja_depth(y, cloud)
    return {"kind": args.kind, "point": y, "depth": value}


def cmd_median(args) -> Dict[str, Any]:
    cloud = multivariate.PointCloud.from_csv(args.input, header=args.header)
    kind = args.kind
    if kind == "weiszfeld":
        res = multivariate.weiszfeld_1median(cloud)
        out = {"point": res.point, "iterations": res.iterations, "converged": res.converged,
               "message": res.message}
        if not res.converged:
            raise CommandFailed("Weiszfeld iteration did not converge", out)
        return out
    if kind == "tukey":
        res = multivariate.tukey_median_2d(cloud)
        return {"point": res.point, "depth": res.depth, "flagged": res.flagged, "message": res.message}
    if kind == "seb":
        center, radius = multivariate.seb_1center(cloud)
        return {"point": center, "radius": radius}
    if kind == "medoid":
        index = multivariate.medoid(cloud)
        return {"index": index, "point": cloud.data[:, index]}
    if kind == "ortho":
        return {"point": multivariate.orthomedian_2d(cloud)}
    fn = multivariate.centroid if kind == "centroid" else multivariate.cw_median
    return {"point": fn(cloud)}


def cmd_strdist(args) -> Dict[str, Any]:
    u, v = args.u, args.v
    metric = args.metric
    if metric == "qgram":
        value = strings.qgram_dist(u, v, args.q)
    elif metric == "jaccard":
        value = strings.jaccard_qgram(u, v, args.q)
    else:
        value = strings.DISTANCES[metric](u, v)
    return {"metric": metric, "distance": value}


def _strings_output(s) -> Dict[str, Any]:
    return {"string": strings.to_text(s), "symbols": list(s)}


def cmd_strmedian(args) -> Dict[str, Any]:
    X = strings.read_strings(args.input)
    if not X:
        raise InputFormatError(f"No strings in {args.input}")
    if args.method == "hamming":
        med = strings.hamming_median(X)
        out = _strings_output(med.string)
        out.update({"penalty": med.penalty, "candidates": [list(c) for c in med.candidates]})
        return out
    if args.method == "perturb":
        best, penalty = strings.median_string_perturb(X)
    else:
        res = strings.median_string_ga(X, iterations=args.iters, seed=_need_seed(args))
        best, penalty = res.string, res.fitness
    out = _strings_output(best)
    out["penalty"] = penalty
    return out


def cmd_strcenter(args) -> Dict[str, Any]:
    X = strings.read_strings(args.input)
    res = strings.closest_string_ga(X, iterations=args.iters, seed=_need_seed(args))
    out = _strings_output(res.string)
    out.update({"max_distance": res.fitness, "solutions": [strings.to_text(s) for s in res.best_found]})
    return out


def cmd_impact(args) -> Dict[str, Any]:
    records = informetric.read_producers(args.input)
    if args.kind == "universal":
        spec = informetric.ImpactSpec(args.phi, args.measure_transform, args.integral, args.eta)
        values = [informetric.universal_impact(spec, x) for x in records]
    else:
        values = [informetric.impact_index(args.kind, x) for x in records]
    return {"kind": args.kind, "values": values}


def cmd_infocentroid(args) -> Dict[str, Any]:
    records = informetric.read_producers(args.input)
    if not records:
        raise InputFormatError(f"No producer records in {args.input}")
    if args.method == "median":
        y = informetric.m1_median(records, args.p, args.r)
        return {"vector": list(y.values), "penalty": sum(
            informetric.dpr_dist("M1", args.p, args.r, x, y) for x in records)}
    y = informetric.dpr2_centroid(records, args.p, args.r)
    return {"vector": list(y.values), "penalty": informetric.dpr2_penalty(records, y, args.p, args.r)}


def cmd_spread(args) -> Dict[str, Any]:
    weights = _floats(args.weights, "weights")
    spec = characteristics.SpreadSpec(args.kind, tuple(weights) if weights else None,
                                      qtype=args.qtype)
    return {"kind": args.kind, "values": [characteristics.spread(spec, x) for x in _read_vectors(args.input)]}


def cmd_orness(args) -> Dict[str, Any]:
    weights = _floats(args.weights, "weights")
    if args.kind == "owa":
        value = characteristics.owa_orness(_need(weights, "--weights"))
        return {"method": "owa_exact", "orness": value, "andness": characteristics.andness(value)}
    spec = core.MeanSpec.parse(args.kind)
    n = _need(args.n, "--n")
    seed = _need_seed(args)
    fn = lambda x: core.aggregate(spec, x)
    if args.average:
        est = characteristics.aveorness_mc(fn, n, args.m, seed)
    else:
        est = characteristics.orness(fn, n, args.m, seed)
    return {"method": "mc", "orness": est.value, "stderr": est.stderr, "samples": est.samples,
            "andness": characteristics.andness(est.value)}


def cmd_entropy(args) -> Dict[str, Any]:
    w = _need(_floats(args.weights, "weights"), "--weights")
    return {"entropy": characteristics.entropy(w)}


def cmd_exemplar(args) -> Dict[str, Any]:
    if args.matrix:
        space = exemplar.SemimetricSpace.from_csv(args.input)
    elif args.strings:
        space = exemplar.SemimetricSpace.from_strings(strings.read_strings(args.input),
                                                      args.metric or "levenshtein")
    else:
        metric = args.metric or "euclidean"
        if metric not in POINT_METRICS:
            raise UsageError(f"--metric for points must be one of {', '.join(POINT_METRICS)}, got '{metric}'")
        cloud = multivariate.PointCloud.from_csv(args.input, header=args.header)
        space = exemplar.SemimetricSpace.from_points(cloud, multivariate.MetricSpec(
            multivariate.MetricKind(metric)))
    if args.method == "exact":
        res = exemplar.exemplar_exact(space, args.fold)
    elif args.method == "pruned":
        res = exemplar.exemplar_pruned(space, args.fold)
    else:
        res = exemplar.exemplar_approx(space, args.fold, k=args.k, restarts=args.restarts,
                                       seed=_need_seed(args))
    n = space.n
    return {"index": res.index, "penalty": res.penalty, "dist_calls": res.dist_calls,
            "speedup": (n * (n - 1) / 2) / res.dist_calls if res.dist_calls else None,
            "method": res.method}


def cmd_config(args) -> Dict[str, Any]:
    cfg = get_fusion_config()
    return {"config": cfg.config, "validation": cfg.validate()}


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", help="Output file (default: stdout)")
    common.add_argument("--format", choices=["json", "csv"], help="Output format")
    common.add_argument("--seed", type=int, help="Random seed for stochastic commands")
    common.add_argument("--tol", type=float, help="Numerical tolerance where applicable")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = _Parser(prog="fusion", description="Data fusion toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("aggregate", parents=[common], help="Aggregate each row of a CSV file")
    p.add_argument("input")
    p.add_argument("--kind", required=True,
                   help="MeanSpec (amean, pmean(2), os(3), ...) or owa|wam|wqam|trimmed|winsorized|quantile|extended_owa")
    p.add_argument("--weights")
    p.add_argument("--phi", default="identity")
    p.add_argument("--param", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--qtype", type=int, default=7)
    p.add_argument("--triangle", default="uniform")
    p.set_defaults(handler=cmd_aggregate)

    p = sub.add_parser("integral", parents=[common], help="Fuzzy integrals of each CSV row")
    p.add_argument("input")
    p.add_argument("--type", choices=sorted(INTEGRAL_FNS), default="choquet")
    p.add_argument("--measure", required=True, help="JSON map from subset bitmask to measure value")
    p.set_defaults(handler=cmd_integral)

    p = sub.add_parser("fit", parents=[common], help="Fit aggregation weights to data")
    p.add_argument("method", choices=["wam-lse", "wam-lad", "wam-lmd", "wam-rank", "wam-reg", "wqam", "powmean"])
    p.add_argument("input")
    p.add_argument("--criterion", choices=["lse", "lad", "lmd"], default="lse")
    p.add_argument("--p", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--phi", default="identity")
    p.add_argument("--param", type=float)
    p.add_argument("--linearized", action="store_true")
    p.add_argument("--p-min", type=float, default=0.1)
    p.add_argument("--p-max", type=float, default=10.0)
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("depth", parents=[common], help="Data depth of a point")
    p.add_argument("input")
    p.add_argument("--kind", choices=["tukey", "liu", "oja"], default="tukey")
    p.add_argument("--point", required=True)
    p.add_argument("--mode", choices=["exact2d", "mc"], default="exact2d")
    p.add_argument("--m", type=int, default=2000)
    p.add_argument("--header", action="store_true")
    p.set_defaults(handler=cmd_depth)

    p = sub.add_parser("median", parents=[common], help="Multivariate location estimates")
    p.add_argument("input")
    p.add_argument("--kind", choices=["weiszfeld", "cw", "centroid", "medoid", "seb", "tukey", "ortho"],
                   default="weiszfeld")
    p.add_argument("--header", action="store_true")
    p.set_defaults(handler=cmd_median)

    p = sub.add_parser("strdist", parents=[common], help="Distance between two strings")
    p.add_argument("metric", choices=sorted(strings.DISTANCES) + ["qgram", "jaccard"])
    p.add_argument("u")
    p.add_argument("v")
    p.add_argument("--q", type=int, default=2)
    p.set_defaults(handler=cmd_strdist)

    p = sub.add_parser("strmedian", parents=[common], help="Median string of a string file")
    p.add_argument("input")
    p.add_argument("--method", choices=["hamming", "ga", "perturb"], default="hamming")
    p.add_argument("--iters", type=int)
    p.set_defaults(handler=cmd_strmedian)

    p = sub.add_parser("strcenter", parents=[common], help="Closest string under Hamming distance")
    p.add_argument("input")
    p.add_argument("--iters", type=int)
    p.set_defaults(handler=cmd_strcenter)

    p = sub.add_parser("impact", parents=[common], help="Impact indices of producer records")
    p.add_argument("input")
    p.add_argument("--kind", choices=[k.value for k in informetric.IndexKind] + ["universal"], default="h")
    p.add_argument("--phi", default="identity")
    p.add_argument("--measure-transform", default="identity")
    p.add_argument("--integral", choices=sorted(informetric.INTEGRALS), default="choquet")
    p.add_argument("--eta", default="identity")
    p.set_defaults(handler=cmd_impact)

    p = sub.add_parser("infocentroid", parents=[common], help="Centroid or 1-median of producer records")
    p.add_argument("input")
    p.add_argument("--method", choices=["centroid", "median"], default="centroid")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--r", type=float, default=1.0)
    p.set_defaults(handler=cmd_infocentroid)

    p = sub.add_parser("spread", parents=[common], help="Spread measure of each CSV row")
    p.add_argument("input")
    p.add_argument("--kind", choices=[k.value for k in characteristics.SpreadKind], default="sd")
    p.add_argument("--weights")
    p.add_argument("--qtype", type=int, default=7)
    p.set_defaults(handler=cmd_spread)

    p = sub.add_parser("orness", parents=[common], help="Orness of a fusion function")
    p.add_argument("--kind", required=True, help="owa (exact, needs --weights) or a MeanSpec (Monte Carlo)")
    p.add_argument("--weights")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--average", action="store_true", help="Average orness instead of orness")
    p.set_defaults(handler=cmd_orness)

    p = sub.add_parser("entropy", parents=[common], help="Entropy of a weighting vector")
    p.add_argument("--weights", required=True)
    p.set_defaults(handler=cmd_entropy)

    p = sub.add_parser("exemplar", parents=[common], help="Exemplar of a finite semimetric space")
    p.add_argument("input")
    p.add_argument("--method", choices=["exact", "pruned", "approx"], default="pruned")
    p.add_argument("--fold", choices=["sum", "max", "sum_sq"], default="sum")
    p.add_argument("--metric", help="Point metric (default euclidean) or string distance (default levenshtein)")
    p.add_argument("--matrix", action="store_true", help="Input is a distance matrix CSV")
    p.add_argument("--strings", action="store_true", help="Input is a string file")
    p.add_argument("--k", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--header", action="store_true")
    p.set_defaults(handler=cmd_exemplar)

    p = sub.add_parser("config", parents=[common], help="Show the merged configuration")
    p.set_defaults(handler=cmd_config)

    return parser


def _input_paths(args) -> List[str]:
    paths = []
    for attr in ("input", "measure"):
        value = getattr(args, attr, None)
        if value:
            paths.append(value)
    return paths


def _emit(document: Dict[str, Any], args, stdout) -> None:
    output_cfg = get_fusion_config().get_output_config()
    fmt = args.format or output_cfg["format"]
    text = _to_csv(document) if fmt == "csv" else canonical_json(document, output_cfg["significant_digits"]) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        stdout.write(text)


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    """Parse argv, execute one command and return the process exit code"""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        if not args.command:
            raise UsageError("a command is required")
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        sys.stderr.write(f"fusion: error: {e}\n")
        return EXIT_USAGE

    if args.verbose:
        logging.getLogger("fusionkit").setLevel(logging.DEBUG)

    status = EXIT_OK
    try:
        extra = [args.u, args.v] if args.command == "strdist" else []
        digest = _digest(_input_paths(args), extra)
        try:
            result = args.handler(args)
        except CommandFailed as e:
            logger.error(f"{args.command}: {e}")
            result, status = e.result, EXIT_COMPUTATION
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        sys.stderr.write(f"fusion: error: {e}\n")
        return EXIT_USAGE
    except SolverError as e:
        logger.error(f"{args.command}: {e}")
        sys.stderr.write(f"fusion: computation failed: {e}\n")
        return EXIT_COMPUTATION
    except (FusionError, OSError) as e:
        logger.error(f"{args.command}: {e}")
        sys.stderr.write(f"fusion: error: {e}\n")
        return EXIT_USAGE

    document = {"command": args.command, "input_digest": digest, "seed": args.seed, "result": result}
    _emit(document, args, stdout)
    return status
