"""Experiment runners: convergence, lower-bound, histogram-demo, conditions.

Each runner maps a validated config to ResultRows, writes one CSV (and SVG
plots where the experiment calls for them), and is deterministic for a fixed
config: cell seeds are derived from (seed, classifier index, n index), rows
are sorted canonically before emission, and timing defaults to zero so two
runs of one config emit identical bytes.  Cells can run in parallel without
changing any output byte.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..analysis import estimate_condition2, estimate_condition3
from ..certification import NeighborhoodBayesFamily, certify_astute, evaluate_cell
from ..classifiers import (
    BandwidthRule,
    HistogramFamily,
    KernelFamily,
    KernelId,
    KernelSpec,
    KNNFamily,
    LogCeil,
    PowerLaw,
)
from ..distributions import (
    DataDistribution,
    derive_seed,
    make_line_distribution,
    make_two_circles_distribution,
    make_two_segments_distribution,
)
from ..errors import ConfigError
from .config import ExperimentConfig
from .svgplot import PlotLayout, emit_plot

__all__ = [
    "ResultRow",
    "rows_to_csv",
    "rows_from_csv",
    "write_csv",
    "build_distribution",
    "build_family",
    "run_convergence",
    "run_lower_bound",
    "run_histogram_demo",
    "run_conditions",
    "run_certify",
    "CSV_HEADER",
]

CSV_HEADER = "experiment_id,classifier,n,kappa,mean,std,trials,seed,wall_time_ms"


@dataclass(frozen=True)
class ResultRow:
    experiment_id: str
    classifier: str
    n: int
    kappa: str  # numeric text, "accuracy", or a condition tag
    mean: float
    std: float
    trials: int
    seed: int
    wall_time_ms: int

    def __post_init__(self):
        assert self.std >= 0.0
        if self.kappa == "accuracy" or _is_float(self.kappa):
            assert 0.0 <= self.mean <= 1.0


def _is_float(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _kappa_sort_key(kappa: str):
    if kappa == "accuracy":
        return (0, 0.0, "")
    if _is_float(kappa):
        return (1, float(kappa), "")
    return (2, 0.0, kappa)


def _row_sort_key(row: ResultRow):
    return (row.experiment_id, row.classifier, row.n, _kappa_sort_key(row.kappa))


def rows_to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for row in sorted(rows, key=_row_sort_key):
        lines.append(
            f"{row.experiment_id},{row.classifier},{row.n},{row.kappa},"
            f"{row.mean:.6g},{row.std:.6g},{row.trials},{row.seed},{row.wall_time_ms}"
        )
    return "\n".join(lines) + "\n"


def rows_from_csv(text: str) -> list[ResultRow]:
    lines = text.strip().split("\n")
    if lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected header {lines[0]!r}")
    out = []
    for line in lines[1:]:
        exp, clf, n, kappa, mean, std, trials, seed, wall = line.split(",")
        out.append(
            ResultRow(exp, clf, int(n), kappa, float(mean), float(std), int(trials),
                      int(seed), int(wall))
        )
    return out


def write_csv(rows, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(rows_to_csv(rows), encoding="utf-8", newline="")
    return path


# ---------------------------------------------------------------------------
# config -> objects
# ---------------------------------------------------------------------------


def build_distribution(config: ExperimentConfig) -> DataDistribution:
    if config.distribution == "two_circles":
        return make_two_circles_distribution()
    if config.distribution == "line":
        return make_line_distribution()
    return make_two_segments_distribution(
        config.pos_segment, config.neg_segment, config.segment_noise
    )


FAMILY_BUILDERS = {
    "exp_sqrtlog": lambda dist: KernelFamily(
        KernelSpec(KernelId.EXPONENTIAL, BandwidthRule.SQRT_LOG)
    ),
    "poly_cuberoot": lambda dist: KernelFamily(
        KernelSpec(KernelId.POLYNOMIAL, BandwidthRule.CUBE_ROOT)
    ),
    "knn_log2": lambda dist: KNNFamily(LogCeil(1.0)),
    "knn_pow04": lambda dist: KNNFamily(PowerLaw(0.4)),
    "hist_pow04": lambda dist: HistogramFamily(PowerLaw(0.4)),
    "neighbor_bayes": lambda dist: NeighborhoodBayesFamily(dist),
}


def build_family(name: str, dist: DataDistribution):
    try:
        return FAMILY_BUILDERS[name](dist)
    except KeyError:
        raise ConfigError(
            f"field classifiers: unknown classifier {name!r}; "
            f"known ids: {', '.join(sorted(FAMILY_BUILDERS))}"
        ) from None


# ---------------------------------------------------------------------------
# astuteness-style experiments
# ---------------------------------------------------------------------------


def _run_astuteness_cell(args) -> list[ResultRow]:
    (config, clf_idx, clf_name, n_idx, n) = args
    dist = build_distribution(config)
    family = build_family(clf_name, dist)
    cell_seed = derive_seed(config.seed, clf_idx, n_idx)
    started = time.perf_counter()
    reports, acc = evaluate_cell(
        family,
        dist,
        n,
        config.kappas,
        config.test_points,
        config.trials,
        cell_seed,
        config.grid_step,
    )
    elapsed_ms = int((time.perf_counter() - started) * 1000) if config.timing else 0
    rows = [
        ResultRow(
            config.experiment, clf_name, n, "accuracy",
            acc.accuracy, acc.accuracy_std, config.trials, cell_seed, elapsed_ms,
        )
    ]
    for kappa in config.kappas:
        rep = reports[kappa]
        rows.append(
            ResultRow(
                config.experiment, clf_name, n, f"{kappa:.6g}",
                rep.astuteness, rep.astuteness_std, config.trials, cell_seed, elapsed_ms,
            )
        )
    return rows


def _run_cells(config: ExperimentConfig, jobs: int) -> list[ResultRow]:
    cells = [
        (config, ci, name, ni, n)
        for ci, name in enumerate(config.classifiers)
        for ni, n in enumerate(config.n_schedule)
    ]
    rows: list[ResultRow] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for cell_rows in pool.map(_run_astuteness_cell, cells):
                rows.extend(cell_rows)
    else:
        for cell in cells:
            rows.extend(_run_astuteness_cell(cell))
    return rows


def _emit_per_classifier_plots(
    rows: list[ResultRow], config: ExperimentConfig, out_dir: Path, stem: str
) -> list[Path]:
    paths = []
    for name in config.classifiers:
        sub = [r for r in rows if r.classifier == name]
        layout = PlotLayout(title=f"{stem}: {name}", y_label="astuteness / accuracy")
        paths.append(emit_plot(sub, layout, out_dir / f"{stem}_{name}.svg"))
    return paths


def _run_astuteness_experiment(config: ExperimentConfig, jobs: int, stem: str):
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = _run_cells(config, jobs)
    csv_path = write_csv(rows, out_dir / f"{stem}.csv")
    plot_paths = _emit_per_classifier_plots(rows, config, out_dir, stem)
    return rows, csv_path, plot_paths


def run_convergence(config: ExperimentConfig, jobs: int = 1):
    """Astuteness and accuracy versus n on the experiment distribution; one
    plot per classifier with the accuracy series plus one series per kappa."""
    if config.experiment != "convergence":
        raise ConfigError("field experiment: expected convergence")
    return _run_astuteness_experiment(config, jobs, "convergence")


def run_lower_bound(config: ExperimentConfig, jobs: int = 1):
    """Astuteness-vs-n for a logarithmic and a polynomial neighbor schedule
    on the ramp distribution, plus their plain accuracy series."""
    if config.experiment != "lower_bound":
        raise ConfigError("field experiment: expected lower_bound")
    if config.distribution != "line":
        raise ConfigError("field distribution: lower_bound runs on the line distribution")
    rows, csv_path, _ = _run_astuteness_experiment(config, jobs, "lower_bound")
    out_dir = Path(config.out_dir)
    layout = PlotLayout(title="lower_bound", y_label="astuteness / accuracy")
    plot = emit_plot(rows, layout, out_dir / "lower_bound.svg")
    return rows, csv_path, [plot]


def run_histogram_demo(config: ExperimentConfig, jobs: int = 1):
    """Histogram vs. kernel astuteness on the two-segment geometry, where
    empty cells pin the histogram's off-support predictions."""
    if config.experiment != "histogram_demo":
        raise ConfigError("field experiment: expected histogram_demo")
    if config.distribution != "two_segments":
        raise ConfigError("field distribution: histogram_demo runs on two_segments")
    return _run_astuteness_experiment(config, jobs, "histogram_demo")


# ---------------------------------------------------------------------------
# condition estimators
# ---------------------------------------------------------------------------


def run_conditions(config: ExperimentConfig, jobs: int = 1):
    """Tail-weight (cond2) and scaled max-weight (cond3) estimates across the
    n schedule, with t_n = sqrt(d * k_n * ln n) for neighbor classifiers."""
    if config.experiment != "conditions":
        raise ConfigError("field experiment: expected conditions")
    dist = build_distribution(config)
    rows: list[ResultRow] = []
    for ci, name in enumerate(config.classifiers):
        family = build_family(name, dist)
        for ni, n in enumerate(config.n_schedule):
            cell_seed = derive_seed(config.seed, ci, ni)
            started = time.perf_counter()
            clf = family.fit(dist.sample(n, cell_seed))
            c2 = estimate_condition2(clf, dist, config.cond_p, config.cond_grid)
            k = getattr(clf, "k", None)
            t_n = math.sqrt(dist.dim * k * math.log(n)) if k else math.sqrt(
                dist.dim * math.log(n)
            )
            c3 = estimate_condition3(clf, t_n, config.cond_grid, dist=dist)
            elapsed_ms = int((time.perf_counter() - started) * 1000) if config.timing else 0
            rows.append(
                ResultRow(
                    config.experiment, name, n, f"cond2_p{config.cond_p:g}",
                    c2.value, 0.0, 1, cell_seed, elapsed_ms,
                )
            )
            rows.append(
                ResultRow(
                    config.experiment, name, n, "cond3",
                    c3.value, 0.0, 1, cell_seed, elapsed_ms,
                )
            )
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(rows, out_dir / "conditions.csv")
    return rows, csv_path, []


# ---------------------------------------------------------------------------
# single-point certification (debugging aid)
# ---------------------------------------------------------------------------


def run_certify(config: ExperimentConfig):
    if config.experiment != "certify":
        raise ConfigError("field experiment: expected certify")
    dist = build_distribution(config)
    family = build_family(config.classifier, dist)
    clf = family.fit(dist.sample(config.n, config.seed))
    return certify_astute(
        clf, dist, list(config.x), config.y, config.kappa, config.grid_step
    )
