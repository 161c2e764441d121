"""Flat typed key-value experiment configs.

Format: UTF-8 text, one `key = value` pair per line, `#` starts a comment,
blank lines ignored.  Unknown keys are rejected with their line number.
Lists are comma-separated.  serialize_config(parse_config_text(s)) is the
canonical form of s, and parse(serialize(c)) == c for every valid config.

Documented keys
---------------
experiment      convergence | lower_bound | histogram_demo | conditions | certify
distribution    two_circles | line | two_segments
classifiers     comma list of classifier ids (see runner.FAMILY_BUILDERS)
n_schedule      comma list of ints, strictly increasing
kappas          comma list of floats in (0, 1), strictly increasing
test_points     int >= 1
trials          int >= 1
grid_step       float > 0
seed            unsigned 64-bit int
out_dir         output directory
timing          true | false; false (the default) writes wall_time_ms = 0 so
                repeated runs emit byte-identical CSVs
pos_segment     two floats (two_segments geometry)
neg_segment     two floats
segment_noise   float in [0, 0.5)
cond_p          float in (0, 1): ball mass for the tail-weight estimator
cond_grid       int: query-grid resolution for the condition estimators
classifier      single classifier id            (certify only)
n               training-set size               (certify only)
kappa           region shrink factor            (certify only)
x               comma list of floats: the anchor (certify only)
y               1 or -1: the anchor's label     (certify only)
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from ..errors import ConfigError

__all__ = ["ExperimentConfig", "parse_config", "parse_config_text", "serialize_config"]

EXPERIMENTS = ("convergence", "lower_bound", "histogram_demo", "conditions", "certify")
DISTRIBUTIONS = ("two_circles", "line", "two_segments")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    distribution: str
    classifiers: tuple[str, ...]
    n_schedule: tuple[int, ...]
    kappas: tuple[float, ...]
    test_points: int = 20
    trials: int = 3
    grid_step: float = 0.01
    seed: int = 0
    out_dir: str = "results"
    timing: bool = False
    pos_segment: tuple[float, float] = (0.0, 0.3)
    neg_segment: tuple[float, float] = (0.7, 1.0)
    segment_noise: float = 0.1
    cond_p: float = 0.2
    cond_grid: int = 256
    classifier: str | None = None
    n: int | None = None
    kappa: float | None = None
    x: tuple[float, ...] | None = None
    y: int | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"field experiment: unknown experiment {self.experiment!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise ConfigError(f"field distribution: unknown distribution {self.distribution!r}")
        if any(b <= a for a, b in zip(self.n_schedule, self.n_schedule[1:])):
            raise ConfigError("field n_schedule: must be strictly increasing")
        if any(b <= a for a, b in zip(self.kappas, self.kappas[1:])):
            raise ConfigError("field kappas: must be strictly increasing")
        if any(not (0.0 < k < 1.0) for k in self.kappas):
            raise ConfigError("field kappas: values must lie in (0, 1)")
        if self.test_points < 1:
            raise ConfigError("field test_points: must be >= 1")
        if self.trials < 1:
            raise ConfigError("field trials: must be >= 1")
        if not self.grid_step > 0:
            raise ConfigError("field grid_step: must be positive")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("field seed: must fit in 64 unsigned bits")
        if not (0.0 <= self.segment_noise < 0.5):
            raise ConfigError("field segment_noise: must lie in [0, 0.5)")
        if not (0.0 < self.cond_p < 1.0):
            raise ConfigError("field cond_p: must lie in (0, 1)")
        if self.cond_grid < 2:
            raise ConfigError("field cond_grid: must be >= 2")
        if self.experiment == "certify":
            missing = [
                k for k in ("classifier", "n", "kappa", "x", "y") if getattr(self, k) is None
            ]
            if missing:
                raise ConfigError(f"certify configs need fields: {', '.join(missing)}")
            if self.y not in (1, -1):
                raise ConfigError("field y: must be 1 or -1")
            if not (0.0 < self.kappa <= 1.0):
                raise ConfigError("field kappa: must lie in (0, 1]")


_LIST_INT = ("n_schedule",)
_LIST_FLOAT = ("kappas", "pos_segment", "neg_segment", "x")
_LIST_STR = ("classifiers",)
_SCALAR_INT = ("test_points", "trials", "seed", "cond_grid", "n", "y")
_SCALAR_FLOAT = ("grid_step", "segment_noise", "cond_p", "kappa")
_SCALAR_BOOL = ("timing",)
_SCALAR_STR = ("experiment", "distribution", "out_dir", "classifier")

_ALL_KEYS = {f.name for f in fields(ExperimentConfig)}


def _parse_value(key: str, raw: str, lineno: int):
    def fail(msg: str):
        raise ConfigError(f"line {lineno}: field {key}: {msg}")

    items = [part.strip() for part in raw.split(",")] if raw else []
    try:
        if key in _LIST_INT:
            return tuple(int(v) for v in items)
        if key in _LIST_FLOAT:
            vals = tuple(float(v) for v in items)
            if key in ("pos_segment", "neg_segment") and len(vals) != 2:
                fail("expected exactly two floats")
            return vals
        if key in _LIST_STR:
            return tuple(items)
        if key in _SCALAR_INT:
            return int(raw)
        if key in _SCALAR_FLOAT:
            return float(raw)
        if key in _SCALAR_BOOL:
            if raw not in ("true", "false"):
                fail("expected true or false")
            return raw == "true"
        return raw
    except ValueError as exc:
        fail(str(exc))


def parse_config_text(text: str) -> ExperimentConfig:
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw, lineno)
    for required in ("experiment", "distribution", "classifiers", "n_schedule", "kappas"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    return ExperimentConfig(**values)


def parse_config(path: str | Path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config: ExperimentConfig) -> str:
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {_format_value(value)}")
    return "\n".join(lines) + "\n"
