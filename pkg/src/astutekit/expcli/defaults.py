"""Pinned default configs for each experiment.

These are the committed settings the acceptance runs use; the sample config
files under configs/ mirror them (a test keeps the two in sync).
"""

from __future__ import annotations

from .config import ExperimentConfig

__all__ = ["default_config", "DEFAULTS"]


def _convergence() -> ExperimentConfig:
    return ExperimentConfig(
        experiment="convergence",
        distribution="two_circles",
        classifiers=("exp_sqrtlog", "poly_cuberoot"),
        n_schedule=(250, 500, 1000, 2000, 4000, 8000),
        kappas=(0.1, 0.3, 0.5),
        test_points=20,
        trials=3,
        grid_step=0.01,
        seed=0,
        out_dir="results/convergence",
    )


def _lower_bound() -> ExperimentConfig:
    return ExperimentConfig(
        experiment="lower_bound",
        distribution="line",
        classifiers=("knn_log2", "knn_pow04"),
        n_schedule=(250, 1000, 4000, 16000, 64000, 100000),
        kappas=(0.5,),
        test_points=100,
        trials=3,
        grid_step=0.01,
        seed=0,
        out_dir="results/lower_bound",
    )


def _histogram_demo() -> ExperimentConfig:
    return ExperimentConfig(
        experiment="histogram_demo",
        distribution="two_segments",
        classifiers=("hist_pow04", "exp_sqrtlog"),
        n_schedule=(250, 1000, 4000, 16000),
        kappas=(0.5, 0.9),
        test_points=100,
        trials=3,
        grid_step=0.01,
        seed=0,
        out_dir="results/histogram_demo",
        pos_segment=(0.0, 0.3),
        neg_segment=(0.7, 1.0),
        segment_noise=0.1,
    )


def _conditions() -> ExperimentConfig:
    return ExperimentConfig(
        experiment="conditions",
        distribution="line",
        classifiers=("knn_log2", "knn_pow04"),
        n_schedule=(250, 1000, 4000, 16000, 64000),
        kappas=(0.5,),
        test_points=1,
        trials=1,
        grid_step=0.01,
        seed=0,
        out_dir="results/conditions",
        cond_p=0.2,
        cond_grid=256,
    )


DEFAULTS = {
    "convergence": _convergence,
    "lower_bound": _lower_bound,
    "histogram_demo": _histogram_demo,
    "conditions": _conditions,
}


def default_config(experiment: str) -> ExperimentConfig:
    return DEFAULTS[experiment]()
