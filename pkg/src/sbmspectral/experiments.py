"""Monte Carlo sweeps: recovery phase diagrams, agreement maps, approximation
boxplots, and bound pass rates.

Every trial seed is ``derive_seed(master_seed, *coords)`` for the trial's
grid coordinates, so results do not depend on execution order, worker count,
or which other cells are in the grid.  Aggregation happens in grid order in
the parent process.
"""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approximations import (
    KINDS_BY_METHOD,
    ApproxKind,
    ApproxSpectra,
    approx_report,
    approx_vector,
    fiedler_pair,
)
from .bounds import (
    RegimeConstants,
    concentration_stats,
    eigenvalue_sandwich_check,
    measure_spectra,
)
from .clustering import Method, agreement, cluster
from .config import DEFAULT
from .errors import NumericError, ParameterError
from .graph_matrices import degree_profile
from .rng import MASK64, derive_seed
from .sbm import SbmParams, sample, u2star

# fixed first coordinate per study so streams never collide across studies
_GRID, _BOX, _BOUND = 1, 2, 3


@dataclass(frozen=True)
class GridSpec:
    n: int
    alphas: tuple
    betas: tuple
    trials: int
    master_seed: int = 0
    methods: tuple = (Method.UNNORMALIZED, Method.NORMALIZED)
    self_loops: bool = True

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "methods", tuple(Method.parse(m) for m in self.methods))
        if self.n < 4 or self.n % 2:
            raise ParameterError(f"n must be even and >= 4, got {self.n}")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.alphas or not self.betas:
            raise ParameterError("alphas and betas must be non-empty")
        if list(self.alphas) != sorted(self.alphas) or list(self.betas) != sorted(self.betas):
            raise ParameterError("alphas and betas must be ascending")
        if not self.methods:
            raise ParameterError("at least one method is required")
        if not 0 <= int(self.master_seed) <= MASK64:
            raise ParameterError("master_seed must be a 64-bit unsigned integer")
        scale = math.log(self.n) / self.n
        if max(self.alphas) * scale > 1:
            raise ParameterError("largest alpha gives p > 1 at this n")

    def cells(self):
        """``(i, j, alpha, beta)`` in row-major order (alpha outer)."""
        for i, a in enumerate(self.alphas):
            for j, b in enumerate(self.betas):
                yield i, j, a, b


def default_grid(n=600, trials=20, master_seed=0):
    """alpha in 1..30 (step 1), beta in 0.5..10 (step 0.5)."""
    return GridSpec(n, tuple(float(a) for a in range(1, 31)),
                    tuple(0.5 * k for k in range(1, 21)), trials, master_seed)


@dataclass
class MethodStats:
    trials: int
    successes: int = 0
    agreement_sum: float = 0.0
    errors: int = 0
    bound_pass_counts: dict = field(default_factory=dict)

    @property
    def success_rate(self):
        return self.successes / self.trials

    @property
    def mean_agreement(self):
        return self.agreement_sum / self.trials


@dataclass
class CellResult:
    alpha: float
    beta: float
    methods: dict
    trial_seeds: list

    def stats(self, method):
        return self.methods[Method.parse(method)]


def _run_cell_trial(task):
    n, alpha, beta, seed, methods, self_loops, tolerances = task
    graph = sample(SbmParams.critical(n, alpha, beta, self_loops), seed)
    ref = u2star(n)
    out = []
    for m in methods:
        try:
            res = cluster(graph.adjacency, m, reference=ref, seed=seed, tolerances=tolerances)
        except NumericError as exc:
            out.append((False, 0.5, type(exc).__name__, False))
            continue
        agr = agreement(res.labeling, graph.ground_truth)
        out.append((res.zero_entries == 0 and agr == 1.0, agr, None, res.gap_flag))
    return out


def _pool_map(fn, tasks, jobs):
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _run_grid(spec, jobs, tolerances, select):
    cells = [c for c in spec.cells()]
    tasks, owners = [], []
    for idx, (i, j, a, b) in enumerate(cells):
        if not a > b or (select is not None and not select(a, b)):
            continue
        for t in range(spec.trials):
            seed = derive_seed(spec.master_seed, _GRID, i, j, t)
            tasks.append((spec.n, a, b, seed, spec.methods, spec.self_loops, tolerances))
            owners.append(idx)
    results = _pool_map(_run_cell_trial, tasks, jobs)

    out = [None] * len(cells)
    for idx, task, trial in zip(owners, tasks, results):
        cell = out[idx]
        if cell is None:
            _, _, a, b = cells[idx]
            cell = out[idx] = CellResult(a, b, {m: MethodStats(spec.trials) for m in spec.methods}, [])
        cell.trial_seeds.append(task[3])
        for m, (ok, agr, err, gap) in zip(spec.methods, trial):
            st = cell.methods[m]
            st.successes += int(ok)
            st.agreement_sum += agr
            if err is not None:
                st.errors += 1
                st.bound_pass_counts["error"] = st.bound_pass_counts.get("error", 0) + 1
                st.bound_pass_counts[err] = st.bound_pass_counts.get(err, 0) + 1
            if gap:
                st.bound_pass_counts["degenerate_gap"] = st.bound_pass_counts.get("degenerate_gap", 0) + 1
    return out


def phase_diagram(spec, jobs=1, tolerances=DEFAULT, select=None):
    """Exact-recovery success rates over the grid.

    Returns one entry per grid cell (row-major, alpha outer); cells with
    ``alpha <= beta``, or rejected by ``select(alpha, beta)``, are ``None``.
    Seeds depend only on a cell's grid indices, so ``select`` never changes
    the results of the cells it keeps.  Failed trials (e.g. an isolated vertex
    for the normalized method) count as non-recoveries with agreement 0.5.
    """
    return _run_grid(spec, jobs, tolerances, select)


def agreement_map(spec, jobs=1, tolerances=DEFAULT, select=None):
    """Mean agreement over the grid (same runs and layout as :func:`phase_diagram`)."""
    return _run_grid(spec, jobs, tolerances, select)


def in_weak_band(alpha, beta, lo=0.3, hi=1.2):
    """alpha > beta and sqrt(alpha) - sqrt(beta) strictly inside (lo, hi)."""
    gap = math.sqrt(alpha) - math.sqrt(beta)
    return alpha > beta and lo < gap < hi


def band_comparison(cells, lo=0.3, hi=1.2):
    """Fraction of band cells where Normalized mean agreement beats Unnormalized."""
    band = [c for c in cells if c is not None and in_weak_band(c.alpha, c.beta, lo, hi)]
    if not band:
        raise ParameterError("no grid cells inside the band")
    wins = sum(
        c.stats(Method.NORMALIZED).mean_agreement > c.stats(Method.UNNORMALIZED).mean_agreement
        for c in band
    )
    return wins / len(band), len(band)


CELL_HEADER = ["alpha", "beta", "method", "trials", "successes", "success_rate",
               "mean_agreement", "errors"]


def cells_to_csv(spec, cells):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CELL_HEADER)
    grid = list(spec.cells())
    for (_, _, a, b), cell in zip(grid, cells):
        for m in spec.methods:
            if cell is None:
                w.writerow([repr(a), repr(b), m.value, "", "", "", "", ""])
                continue
            st = cell.methods[m]
            w.writerow([repr(a), repr(b), m.value, st.trials, st.successes,
                        repr(st.success_rate), repr(st.mean_agreement), st.errors])
    return buf.getvalue()


# --- approximation boxplots -------------------------------------------------


def five_number(values):
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        return (math.nan,) * 5
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return (float(v[0]), float(q1), float(med), float(q3), float(v[-1]))


@dataclass
class BoxplotSeries:
    method: Method
    kind: ApproxKind
    sup_error: list = field(default_factory=list)
    margin: list = field(default_factory=list)
    excluded: int = 0

    def summary(self, metric):
        return five_number(getattr(self, metric))


def _run_box_trial(task):
    n, alpha, beta, seed, plan, tolerances = task
    graph = sample(SbmParams.critical(n, alpha, beta), seed)
    out = []
    for method, kinds in plan:
        try:
            lam, u2 = fiedler_pair(graph.adjacency, method, seed, tolerances)
        except NumericError:
            out.append([None] * len(kinds))
            continue
        row = []
        for kind in kinds:
            if method is Method.UNNORMALIZED:
                s = ApproxSpectra(lambda2_L=lam)
            else:
                s = ApproxSpectra(lambda2_N=lam)
            try:
                approx = approx_vector(kind, graph, s, tolerances)
                r = approx_report(kind, graph, u2, approx=approx)
                row.append((r.sup_error, r.margin))
            except NumericError:
                row.append(None)
        out.append(row)
    return out


def approx_boxplot_study(n, alpha, beta, trials, kinds=None, master_seed=0,
                         methods=(Method.UNNORMALIZED, Method.NORMALIZED), jobs=1,
                         tolerances=DEFAULT):
    """sup-error and margin samples per (method, kind) over seeded trials.

    ``kinds`` defaults to every kind relevant to each method; ``U2Star`` is
    evaluated against both Fiedler vectors.  Returns ``{(method, kind): BoxplotSeries}``.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    SbmParams.critical(n, alpha, beta)  # validates
    plan = []
    for m in (Method.parse(x) for x in methods):
        wanted = KINDS_BY_METHOD[m] if kinds is None else [
            k for k in (ApproxKind.parse(x) if not isinstance(x, ApproxKind) else x for x in kinds)
            if k.method in (None, m)
        ]
        if wanted:
            plan.append((m, tuple(wanted)))
    tasks = [(n, alpha, beta, derive_seed(master_seed, _BOX, t), tuple(plan), tolerances)
             for t in range(trials)]
    results = _pool_map(_run_box_trial, tasks, jobs)
    series = {(m, k): BoxplotSeries(m, k) for m, ks in plan for k in ks}
    for trial in results:
        for (m, ks), row in zip(plan, trial):
            for k, val in zip(ks, row):
                s = series[(m, k)]
                if val is None:
                    s.excluded += 1
                else:
                    s.sup_error.append(val[0])
                    s.margin.append(val[1])
    return series


BOX_HEADER = ["kind", "metric", "min", "q1", "median", "q3", "max", "excluded_trials"]


def boxplot_to_csv(series, method):
    method = Method.parse(method)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BOX_HEADER)
    for (m, k), s in series.items():
        if m is not method:
            continue
        for metric in ("sup_error", "margin"):
            w.writerow([k.value, metric, *(repr(v) for v in s.summary(metric)), s.excluded])
    return buf.getvalue()


# --- bound pass rates --------------------------------------------------------


def _run_bound_trial(task):
    n, alpha, beta, seed, eps, c_lower, c_upper, tolerances = task
    graph = sample(SbmParams.critical(n, alpha, beta), seed)
    try:
        spectra = measure_spectra(graph, seed, tolerances)
        profile = degree_profile(graph.adjacency, graph.ground_truth, q=graph.params.q)
        reports = eigenvalue_sandwich_check(graph, spectra, profile, eps=eps,
                                            c_lower=c_lower, c_upper=c_upper, tolerances=tolerances)
        conc = concentration_stats(graph, tolerances)
    except NumericError as exc:
        return {"error": type(exc).__name__}
    holds = {r.name: bool(r.holds) for r in reports}
    if "lambda2_N_lower" in holds and "lambda2_N_upper" in holds:
        holds["lambda2_N_window"] = holds["lambda2_N_lower"] and holds["lambda2_N_upper"]
    return {
        "holds": holds,
        "concentration": conc,
        "spectra": (spectra.lambda2_L, spectra.lambda3_L, spectra.lambda2_N),
    }


@dataclass
class BoundStudyRow:
    n: int
    trials: int
    passes: dict
    errors: int
    constants: list
    norms: list
    scaled_norms: list

    def pass_rate(self, check):
        return self.passes.get(check, 0) / self.trials


def bound_pass_rate_study(n_list, rc, trials, master_seed=0, eps=0.1, c_lower=None,
                          c_upper=None, jobs=1, tolerances=DEFAULT):
    """Pass rates of the eigenvalue checks and the concentration constant per n.

    Errored trials count as failures for every check.
    """
    if not isinstance(rc, RegimeConstants):
        rc = RegimeConstants(*rc)
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    tasks, owners = [], []
    for n in n_list:
        SbmParams.critical(n, rc.alpha, rc.beta)
        for t in range(trials):
            tasks.append((n, rc.alpha, rc.beta, derive_seed(master_seed, _BOUND, n, t),
                          eps, c_lower, c_upper, tolerances))
            owners.append(n)
    results = _pool_map(_run_bound_trial, tasks, jobs)
    rows = {n: BoundStudyRow(n, trials, {}, 0, [], [], []) for n in n_list}
    for n, res in zip(owners, results):
        row = rows[n]
        if "error" in res:
            row.errors += 1
            continue
        for name, ok in res["holds"].items():
            row.passes[name] = row.passes.get(name, 0) + int(ok)
        row.constants.append(res["concentration"]["ratio"])
        row.norms.append(res["concentration"]["norm"])
        row.scaled_norms.append(res["concentration"]["scaled"])
    return [rows[n] for n in n_list]


BOUND_HEADER = ["n", "check", "trials", "passes", "pass_rate", "errors"]
CONST_HEADER = ["n", "statistic", "min", "q1", "median", "q3", "max"]


def bound_study_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BOUND_HEADER)
    names = sorted({k for r in rows for k in r.passes})
    for r in rows:
        for name in names:
            w.writerow([r.n, name, r.trials, r.passes.get(name, 0), repr(r.pass_rate(name)), r.errors])
    w.writerow([])
    w.writerow(CONST_HEADER)
    for r in rows:
        for stat, vals in (("concentration_C", r.constants), ("norm", r.norms),
                           ("norm_sqrt_np", r.scaled_norms)):
            w.writerow([r.n, stat, *(repr(v) for v in five_number(vals))])
    return buf.getvalue()
