"""Run configuration: flat key = value files plus command-line overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ParseError, ValidationError

__all__ = ["RunConfig", "load_config", "EXPERIMENTS"]

EXPERIMENTS = (
    "metric",
    "curvature",
    "cap-compare",
    "solve",
    "census",
    "flow-frankel",
    "flow-drift",
    "spectrum",
    "jacobi",
    "width",
    "example-cylinder",
    "all",
)


@dataclass(frozen=True)
class RunConfig:
    """Validated experiment parameters; R is derived as a + r."""

    n: int = 3
    r: float = 3.0  # cylinder half-length, the file key is R_minus_a
    grid_N: int = 513
    epsilon: float = 0.6
    epsilon_schedule: tuple | None = None
    experiment: str = "all"
    out_dir: str = "runs/out"
    seed: int = 0

    def validate(self):
        if not isinstance(self.n, int) or not 3 <= self.n <= 16:
            raise ValidationError(f"n must be an integer in [3, 16], got {self.n}", field="n")
        if self.r <= 0:
            raise ValidationError(f"R_minus_a must be positive, got {self.r}", field="R_minus_a")
        if not isinstance(self.grid_N, int) or self.grid_N < 65:
            raise ValidationError(
                f"grid_N must be an integer >= 65, got {self.grid_N}", field="grid_N"
            )
        if self.grid_N % 2 == 0:
            raise ValidationError(
                f"grid_N must be odd so the center node exists, got {self.grid_N}",
                field="grid_N",
            )
        if self.epsilon <= 0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}", field="epsilon")
        if self.epsilon_schedule is not None:
            sched = self.epsilon_schedule
            if len(sched) == 0:
                raise ValidationError("epsilon_schedule is empty", field="epsilon_schedule")
            if any(e <= 0 for e in sched):
                raise ValidationError(
                    "epsilon_schedule entries must be positive", field="epsilon_schedule"
                )
            if any(b >= a for a, b in zip(sched, sched[1:])):
                raise ValidationError(
                    "epsilon_schedule must be strictly decreasing", field="epsilon_schedule"
                )
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(
                f"unknown experiment {self.experiment!r}", field="experiment"
            )
        return self

    @property
    def schedule_or_default(self):
        if self.epsilon_schedule is not None:
            return self.epsilon_schedule
        return (0.4 * self.r, 0.2 * self.r, 0.1 * self.r)


def parse_schedule(text):
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError as exc:
        raise ValidationError(f"bad epsilon_schedule {text!r}", field="epsilon_schedule") from exc


_COERCERS = {
    "n": int,
    "R_minus_a": float,
    "grid_N": int,
    "epsilon": float,
    "epsilon_schedule": parse_schedule,
    "experiment": str,
    "out_dir": str,
    "seed": int,
}

_FIELD_FOR_KEY = {
    "n": "n",
    "R_minus_a": "r",
    "grid_N": "grid_N",
    "epsilon": "epsilon",
    "epsilon_schedule": "epsilon_schedule",
    "experiment": "experiment",
    "out_dir": "out_dir",
    "seed": "seed",
}


def load_config(path, base=None):
    """Parse a flat key = value file onto a RunConfig (defaults live in `base`)."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"config file not found: {path}")
    cfg = base if base is not None else RunConfig()
    updates = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key = value, got {raw!r}", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _COERCERS:
            raise ValidationError(f"line {lineno}: unknown key {key!r}", field=key)
        try:
            updates[_FIELD_FOR_KEY[key]] = _COERCERS[key](value)
        except ValidationError:
            raise
        except ValueError as exc:
            raise ParseError(
                f"line {lineno}: cannot parse {key} value {value!r}", line=lineno
            ) from exc
    cfg = replace(cfg, **updates)
    return cfg.validate()
