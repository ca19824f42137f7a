"""Declarative scenario configuration.

A scenario file is either a JSON object or flat ``key = value`` text
(blank lines and ``#`` comments ignored). Angles accept arithmetic
expressions over numbers and ``pi`` ("pi/8", "3*pi/16"). All fields are
validated before any computation runs.
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

EXPERIMENTS = (
    "chsh",
    "phase_fringe",
    "amplitude_fringe",
    "mixed_state",
    "populations",
    "general_n",
    "distinguishability_demo",
)

FORMATS = ("csv", "json")

_GRID_EXPERIMENTS = ("phase_fringe", "amplitude_fringe", "mixed_state", "general_n")


class SchemaError(ValueError):
    """Configuration violates the scenario schema."""


def parse_angle(value: Any) -> float:
    """Evaluate a numeric literal or a tiny arithmetic expression over pi.

    Allowed syntax: numbers, ``pi``, unary minus, + - * /, parentheses.
    Anything else (names, calls, powers) is rejected.
    """
    if isinstance(value, bool):
        raise SchemaError(f"not a number: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise SchemaError(f"not a number or expression: {value!r}")
    try:
        tree = ast.parse(value.strip(), mode="eval")
    except SyntaxError as exc:
        raise SchemaError(f"cannot parse angle expression {value!r}") from exc

    def evaluate(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return evaluate(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            operand = evaluate(node.operand)
            return -operand if isinstance(node.op, ast.USub) else operand
        if isinstance(node, ast.BinOp) and isinstance(
            node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)
        ):
            left, right = evaluate(node.left), evaluate(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if right == 0:
                raise SchemaError(f"division by zero in {value!r}")
            return left / right
        raise SchemaError(f"unsupported syntax in angle expression {value!r}")

    return evaluate(tree)


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    points: int

    def values(self) -> list[float]:
        if self.points == 1:
            return [float(self.start)]
        step = (self.stop - self.start) / (self.points - 1)
        return [self.start + i * step for i in range(self.points)]


@dataclass(frozen=True)
class ScenarioConfig:
    experiment: str
    n_pairs: int = 2
    gamma: float = math.pi / 8
    theta: float = 0.0
    p_strength: float = 1.0
    distinguishability: float = 1.0
    grid: GridSpec | None = None
    shots: int | None = None
    seed: int | None = None
    trials: int = 12          # random settings per n in the general_n scan
    output: str | None = None
    format: str = "json"

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise SchemaError(
                f"unknown experiment {self.experiment!r}; pick one of {EXPERIMENTS}"
            )
        if self.n_pairs < 1:
            raise SchemaError(f"n_pairs must be >= 1, got {self.n_pairs}")
        if not 0.0 <= self.p_strength <= 1.0:
            raise SchemaError(f"p_strength {self.p_strength} outside [0, 1]")
        if not 0.0 <= self.distinguishability <= 1.0:
            raise SchemaError(
                f"distinguishability {self.distinguishability} outside [0, 1]"
            )
        if self.format not in FORMATS:
            raise SchemaError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.shots is not None and self.shots < 1:
            raise SchemaError(f"shots must be >= 1, got {self.shots}")
        if self.trials < 1:
            raise SchemaError(f"trials must be >= 1, got {self.trials}")
        if self.experiment in _GRID_EXPERIMENTS:
            if self.grid is None:
                raise SchemaError(f"experiment {self.experiment!r} needs a grid")
            if self.grid.points < 2:
                raise SchemaError(f"grid needs at least 2 points, got {self.grid.points}")
            if self.experiment == "general_n":
                values = self.grid.values()
                if any(abs(v - round(v)) > 1e-9 or round(v) < 1 for v in values):
                    raise SchemaError("general_n grid must enumerate integers >= 1")
        if self.shots is not None and self.seed is None:
            raise SchemaError("sampling (shots) requires a seed for reproducibility")


_ANGLE_KEYS = {"gamma", "theta", "grid_start", "grid_stop"}
_INT_KEYS = {"n_pairs", "grid_points", "shots", "seed", "trials"}
_FLOAT_KEYS = {"p_strength", "distinguishability"}
_STR_KEYS = {"experiment", "output", "format"}
_ALL_KEYS = _ANGLE_KEYS | _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def config_from_mapping(raw: dict[str, Any]) -> ScenarioConfig:
    """Build and validate a ScenarioConfig from loosely typed key/values."""
    unknown = set(raw) - _ALL_KEYS
    if unknown:
        raise SchemaError(f"unknown configuration keys: {sorted(unknown)}")
    if "experiment" not in raw:
        raise SchemaError("missing required key 'experiment'")

    kwargs: dict[str, Any] = {"experiment": str(raw["experiment"])}
    for key in ("gamma", "theta"):
        if key in raw:
            kwargs[key] = parse_angle(raw[key])
    for key in ("p_strength", "distinguishability"):
        if key in raw:
            try:
                kwargs[key] = float(raw[key])
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{key} must be a number, got {raw[key]!r}") from exc
    for key in ("n_pairs", "shots", "seed", "trials"):
        if key in raw and raw[key] is not None:
            try:
                kwargs[key] = int(raw[key])
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{key} must be an integer, got {raw[key]!r}") from exc
    if "output" in raw and raw["output"] is not None:
        kwargs["output"] = str(raw["output"])
    if "format" in raw:
        kwargs["format"] = str(raw["format"])

    grid_keys = {"grid_start", "grid_stop", "grid_points"} & set(raw)
    if grid_keys:
        if grid_keys != {"grid_start", "grid_stop", "grid_points"}:
            raise SchemaError(
                "grid needs all of grid_start, grid_stop, grid_points"
            )
        try:
            points = int(raw["grid_points"])
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"grid_points must be an integer, got {raw['grid_points']!r}") from exc
        kwargs["grid"] = GridSpec(
            start=parse_angle(raw["grid_start"]),
            stop=parse_angle(raw["grid_stop"]),
            points=points,
        )

    config = ScenarioConfig(**kwargs)
    config.validate()
    return config


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a scenario from a JSON or flat key=value file."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise SchemaError("JSON scenario must be a single object")
        flat: dict[str, Any] = {}
        for key, value in raw.items():
            if key == "grid" and isinstance(value, dict):
                for sub in ("start", "stop", "points"):
                    if sub in value:
                        flat[f"grid_{sub}"] = value[sub]
            else:
                flat[key] = value
        return config_from_mapping(flat)
    return config_from_mapping(_parse_flat(text))


def _parse_flat(text: str) -> dict[str, Any]:
    raw: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SchemaError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in raw:
            raise SchemaError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw
