"""Command-line front end.

Exit codes: 0 success, 2 parameter error, 3 numeric error, 4 I/O error.
Outputs are written atomically (temp file in the target directory, then
rename), so a failed run never leaves a partial file.  A one-line summary
goes to standard error.

A ``--config FILE`` of ``key = value`` lines (``#`` comments, keys are flag
names without the leading dashes) supplies defaults; explicit flags win.
"""

import argparse
import io
import json
import math
import os
import sys
import tempfile
import time

from . import bounds, experiments
from .approximations import ApproxKind
from .clustering import Method, agreement, cluster
from .config import DEFAULT
from .errors import NumericError, ParameterError
from .graph_matrices import degree_profile
from .heatmap import render_heatmap
from .labels import Labeling
from .sbm import SbmParams, read_edge_list, sample, u2star, write_edge_list

EXIT_PARAM, EXIT_NUMERIC, EXIT_IO = 2, 3, 4
JOBS_ENV = "SBMSPECTRAL_JOBS"

COMMANDS = ("sample", "cluster", "bounds", "phase", "agreement", "boxplot", "concentration")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParameterError(message)


def _float_list(text):
    """``a,b,c`` or an inclusive range ``start:stop:step``."""
    text = text.strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError(f"bad range {text!r}")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + k * step, 12) for k in range(max(count, 0)))
    return tuple(float(x) for x in text.split(",") if x.strip())


def _int_list(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def _default_jobs():
    env = os.environ.get(JOBS_ENV)
    if env:
        return int(env)
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def build_parser():
    top = _Parser(prog="sbmspectral", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out=True):
        p.add_argument("--config", help="key = value defaults file")
        if out:
            p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--solver-tol", type=float)
        p.add_argument("--zero-tol", type=float)
        p.add_argument("--gap-tol", type=float)
        p.add_argument("--dense-cutoff", type=int)

    def model(p):
        p.add_argument("--n", type=int, default=600)
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--p", type=float, help="direct edge probability (instead of --alpha)")
        p.add_argument("--q", type=float, help="direct edge probability (instead of --beta)")
        p.add_argument("--no-self-loops", action="store_true")
        p.add_argument("--seed", type=int, default=0)

    def grid(p, default_format):
        p.add_argument("--n", type=int, default=600)
        p.add_argument("--alphas", type=_float_list, default=tuple(float(a) for a in range(1, 31)))
        p.add_argument("--betas", type=_float_list, default=tuple(0.5 * k for k in range(1, 21)))
        p.add_argument("--trials", type=int, default=20)
        p.add_argument("--master-seed", type=int, default=0)
        p.add_argument("--methods", default="unnormalized,normalized")
        p.add_argument("--no-self-loops", action="store_true")
        p.add_argument("--format", choices=("csv", "json", "svg"), default=default_format)
        p.add_argument("--metric", choices=("success_rate", "mean_agreement"))
        p.add_argument("--svg-method", default="unnormalized", help="method drawn in the SVG")
        p.add_argument("--jobs", type=int)

    p = sub.add_parser("sample", help="draw an SBM graph and write its edge list")
    common(p, out=False)
    model(p)
    p.add_argument("--export", help="edge-list file (default: stdout)")

    p = sub.add_parser("cluster", help="spectral clustering of a sampled or imported graph")
    common(p)
    model(p)
    p.add_argument("--method", default="unnormalized")
    p.add_argument("--import", dest="import_path", help="edge-list file to cluster")

    p = sub.add_parser("bounds", help="closed-form conditions and exponents")
    common(p)
    p.add_argument("--alpha", type=float, required=False)
    p.add_argument("--beta", type=float, required=False)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--n", type=int, help="also sample a graph and run the eigenvalue checks")
    p.add_argument("--seed", type=int, default=0)

    grid(sub.add_parser("phase", help="exact-recovery phase diagram"), "csv")
    grid(sub.add_parser("agreement", help="mean-agreement map"), "csv")
    for name in ("phase", "agreement"):
        common(sub.choices[name])

    p = sub.add_parser("boxplot", help="Fiedler-vector approximation study")
    common(p)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=10.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--method", default="unnormalized")
    p.add_argument("--kinds", help="comma-separated kinds (default: all for the method)")
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int)

    p = sub.add_parser("concentration", help="bound pass rates and concentration constants")
    common(p)
    p.add_argument("--n-list", type=_int_list, default=(500, 1000, 2000))
    p.add_argument("--alpha", type=float, default=10.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--jobs", type=int)
    return top


def read_config(path):
    """Flat ``key = value`` file as a dict of strings."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("_", "-")] = value
    return out


def _config_tokens(cfg):
    tokens = []
    for key, value in cfg.items():
        if value.lower() in ("true", "yes", "on"):
            tokens.append(f"--{key}")
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            tokens += [f"--{key}", value]
    return tokens


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        cfg.pop("config", None)
        idx = argv.index(args.command)
        # file values go first so explicit flags (parsed later) override them
        args = parser.parse_args(argv[: idx + 1] + _config_tokens(cfg) + argv[idx + 1:])
    return args


def _tolerances(args):
    return DEFAULT.with_overrides(
        solver_tol=args.solver_tol, zero_tol=args.zero_tol,
        gap_tol=args.gap_tol, dense_cutoff=args.dense_cutoff,
    )


def _params(args):
    loops = not args.no_self_loops
    if args.alpha is not None and args.beta is not None:
        if args.p is not None or args.q is not None:
            raise ParameterError("give either --alpha/--beta or --p/--q")
        return SbmParams.critical(args.n, args.alpha, args.beta, loops)
    if args.p is not None and args.q is not None:
        return SbmParams.direct(args.n, args.p, args.q, loops)
    raise ParameterError("need --alpha and --beta (or --p and --q)")


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file and rename; stdout if path is None."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _cmd_sample(args, tol):
    params = _params(args)
    graph = sample(params, args.seed, tol.storage_cutoff)
    buf = io.StringIO()
    write_edge_list(graph.adjacency, buf)
    write_atomic(args.export, buf.getvalue())
    edges = buf.getvalue().count("\n") - 1
    return f"sample: n={params.n} edges={edges} seed={args.seed}"


def _cmd_cluster(args, tol):
    if args.import_path:
        with open(args.import_path, encoding="utf-8") as fh:
            A = read_edge_list(fh, tol.storage_cutoff)
        truth = Labeling.ground_truth(A.n)
    else:
        graph = sample(_params(args), args.seed, tol.storage_cutoff)
        A, truth = graph.adjacency, graph.ground_truth
    res = cluster(A, args.method, reference=u2star(A.n), seed=args.seed, tolerances=tol)
    out = res.to_dict()
    out["agreement"] = agreement(res.labeling, truth)
    out["exactly_recovered"] = res.zero_entries == 0 and out["agreement"] == 1.0
    write_atomic(args.out, json.dumps(out) + "\n")
    return f"cluster: n={A.n} method={res.method.value} agreement={out['agreement']:.4f}"


def _cmd_bounds(args, tol):
    if args.alpha is None or args.beta is None:
        raise ParameterError("need --alpha and --beta")
    rc = bounds.RegimeConstants(args.alpha, args.beta)
    a1, xi_star = bounds.condition_A1(rc)
    end = (rc.alpha - rc.beta) / 2.0
    out = {
        "alpha": rc.alpha,
        "beta": rc.beta,
        "A1": a1,
        "A2": bounds.condition_A2(rc),
        "xi_star": xi_star,
        "f_at_half_gap": bounds.f_at_half_gap(rc) if end > 0 else None,
        "tail_exponent": bounds.binomial_diff_tail_exponent(rc, args.eps) if rc.beta > 0 else None,
        "eps": args.eps,
    }
    if args.n is not None:
        graph = sample(SbmParams.critical(args.n, rc.alpha, rc.beta), args.seed, tol.storage_cutoff)
        spectra = bounds.measure_spectra(graph, args.seed, tol)
        profile = degree_profile(graph.adjacency, graph.ground_truth, q=graph.params.q)
        reports = bounds.eigenvalue_sandwich_check(graph, spectra, profile, eps=args.eps, tolerances=tol)
        out["n"] = args.n
        out["checks"] = [r.to_dict() for r in reports]
    write_atomic(args.out, json.dumps(out) + "\n")
    return f"bounds: alpha={rc.alpha} beta={rc.beta} A1={a1} A2={out['A2']}"


def _grid_spec(args):
    methods = tuple(Method.parse(m) for m in args.methods.split(",") if m.strip())
    return experiments.GridSpec(args.n, args.alphas, args.betas, args.trials, args.master_seed,
                                methods, not args.no_self_loops)


def _cells_json(spec, cells):
    rows = []
    for (_, _, a, b), cell in zip(spec.cells(), cells):
        if cell is None:
            rows.append(None)
            continue
        rows.append({
            "alpha": a, "beta": b, "trial_seeds": cell.trial_seeds,
            "methods": {m.value: {"trials": s.trials, "successes": s.successes,
                                  "success_rate": s.success_rate,
                                  "mean_agreement": s.mean_agreement, "errors": s.errors,
                                  "bound_pass_counts": s.bound_pass_counts}
                        for m, s in cell.methods.items()},
        })
    return json.dumps(rows) + "\n"


def _cmd_grid(args, tol):
    spec = _grid_spec(args)
    run = experiments.phase_diagram if args.command == "phase" else experiments.agreement_map
    cells = run(spec, jobs=args.jobs or _default_jobs(), tolerances=tol)
    if args.format == "csv":
        text = experiments.cells_to_csv(spec, cells)
    elif args.format == "json":
        text = _cells_json(spec, cells)
    else:
        metric = args.metric or ("success_rate" if args.command == "phase" else "mean_agreement")
        text = render_heatmap(spec, cells, metric, args.svg_method)
    write_atomic(args.out, text)
    run_cells = sum(c is not None for c in cells)
    return f"{args.command}: cells={run_cells} trials={run_cells * spec.trials}"


def _cmd_boxplot(args, tol):
    method = Method.parse(args.method)
    kinds = None if not args.kinds else [ApproxKind.parse(k.strip()) for k in args.kinds.split(",")]
    series = experiments.approx_boxplot_study(args.n, args.alpha, args.beta, args.trials, kinds,
                                              args.master_seed, (method,),
                                              args.jobs or _default_jobs(), tol)
    if not series:
        raise ParameterError("no requested kind applies to this method")
    if args.format == "csv":
        text = experiments.boxplot_to_csv(series, method)
    else:
        text = json.dumps([{"kind": k.value, "sup_error": s.sup_error, "margin": s.margin,
                            "excluded_trials": s.excluded} for (_, k), s in series.items()]) + "\n"
    write_atomic(args.out, text)
    return f"boxplot: kinds={len(series)} trials={args.trials}"


def _cmd_concentration(args, tol):
    rows = experiments.bound_pass_rate_study(args.n_list, (args.alpha, args.beta), args.trials,
                                             args.master_seed, args.eps,
                                             jobs=args.jobs or _default_jobs(), tolerances=tol)
    write_atomic(args.out, experiments.bound_study_to_csv(rows))
    return f"concentration: sizes={len(rows)} trials={args.trials * len(rows)}"


_HANDLERS = {
    "sample": _cmd_sample,
    "cluster": _cmd_cluster,
    "bounds": _cmd_bounds,
    "phase": _cmd_grid,
    "agreement": _cmd_grid,
    "boxplot": _cmd_boxplot,
    "concentration": _cmd_concentration,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    try:
        args = parse_args(argv)
        if getattr(args, "jobs", None) is not None and args.jobs < 1:
            raise ParameterError("--jobs must be >= 1")
        summary = _HANDLERS[args.command](args, _tolerances(args))
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{summary} wall={time.perf_counter() - start:.2f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
