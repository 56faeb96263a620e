"""Flat key-value run configuration.

Grammar (one assignment per line, ``#`` starts a comment):

    model.preset = example1
    model.theta = 0.5                 # single-field override
    solver.alpha = [0.85, 0.95]
    solver.step = 0.05
    solver.t_end = 500
    solver.corrector_iterations = 1
    run.initial_states = [[30, 5, 10], [10, 20, 5]]
    output.directory = out

Keys use dotted namespaces; values are numbers, bare strings, or bracketed
(possibly nested) lists.  Model parameters accept both the short symbol keys
(``model.r``, ``model.lambda``, ...) and the full field names
(``model.growth_rate``, ...).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .model import ModelParams, State, ValidationError, preset

__all__ = ["ConfigError", "MODEL_KEYS", "RunConfig", "parse_config_text", "load_config"]

DEFAULT_ALPHAS = (0.85, 0.95)
DEFAULT_STEP = 0.05
DEFAULT_T_END = 500.0

MODEL_KEYS = {
    "r": "growth_rate",
    "growth_rate": "growth_rate",
    "k": "carrying_capacity",
    "carrying_capacity": "carrying_capacity",
    "lambda": "infection_rate",
    "infection_rate": "infection_rate",
    "m": "predation_rate",
    "predation_rate": "predation_rate",
    "mu": "infected_death_rate",
    "infected_death_rate": "infected_death_rate",
    "a": "half_saturation",
    "half_saturation": "half_saturation",
    "theta": "conversion_efficiency",
    "conversion_efficiency": "conversion_efficiency",
    "d": "predator_death_rate",
    "predator_death_rate": "predator_death_rate",
}

_KEY_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")
_TOKEN_RE = re.compile(r"\[|\]|,|[^\[\],\s]+")


class ConfigError(ValueError):
    """Malformed configuration text, annotated with line and field context."""


def _parse_scalar(token: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token  # bare string


def _parse_value(text: str, line_no: int):
    tokens = _TOKEN_RE.findall(text)
    if not tokens:
        raise ConfigError(f"line {line_no}: missing value")
    pos = 0

    def parse_item():
        nonlocal pos
        if pos >= len(tokens):
            raise ConfigError(f"line {line_no}: unexpected end of value")
        tok = tokens[pos]
        if tok == "[":
            pos += 1
            items = []
            while True:
                if pos >= len(tokens):
                    raise ConfigError(f"line {line_no}: unclosed '['")
                if tokens[pos] == "]":
                    pos += 1
                    return items
                items.append(parse_item())
                if pos < len(tokens) and tokens[pos] == ",":
                    pos += 1
        if tok in ("]", ","):
            raise ConfigError(f"line {line_no}: unexpected {tok!r}")
        pos += 1
        return _parse_scalar(tok)

    value = parse_item()
    if pos != len(tokens):
        raise ConfigError(f"line {line_no}: trailing tokens after value")
    return value


def parse_config_text(text: str) -> dict:
    """Flat dict of dotted keys to parsed values; later keys override earlier."""
    entries: dict = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value'")
        key, _, value_text = line.partition("=")
        key = key.strip().lower()
        if not _KEY_RE.match(key):
            raise ConfigError(f"line {line_no}: invalid key {key!r}")
        entries[key] = _parse_value(value_text.strip(), line_no)
    return entries


@dataclass(frozen=True)
class RunConfig:
    """Everything a simulation run needs."""

    params: ModelParams
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    initial_states: tuple[State, ...] = ()
    step: float = DEFAULT_STEP
    t_end: float = DEFAULT_T_END
    corrector_iterations: int = 1
    memory_window: Optional[int] = None
    out_dir: Path = Path("out")
    output_format: str = "csv"
    preset_name: Optional[str] = None
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        for alpha in self.alphas:
            if not (0.0 < alpha <= 1.0):
                raise ValidationError(f"order must lie in (0,1], got {alpha}")
        for state in self.initial_states:
            if not state.nonnegative:
                raise ValidationError(f"initial state must be non-negative, got {state}")
        if self.output_format != "csv":
            raise ValidationError(f"unsupported output format {self.output_format!r}")


def _as_float_list(value, key: str) -> list[float]:
    items = value if isinstance(value, list) else [value]
    out = []
    for item in items:
        if not isinstance(item, (int, float)) or isinstance(item, bool):
            raise ConfigError(f"field {key}: expected numbers, got {item!r}")
        out.append(float(item))
    return out


def _as_states(value, key: str) -> list[State]:
    if not isinstance(value, list):
        raise ConfigError(f"field {key}: expected a list of [S, I, P] triples")
    triples = value if value and isinstance(value[0], list) else [value]
    states = []
    for triple in triples:
        if not (isinstance(triple, list) and len(triple) == 3):
            raise ConfigError(f"field {key}: each state needs exactly 3 components")
        states.append(State(*(float(x) for x in triple)))
    return states


def config_from_entries(entries: dict) -> RunConfig:
    """Assemble a RunConfig from parsed flat keys."""
    entries = dict(entries)
    preset_name = entries.pop("model.preset", None)
    base = None
    initial_states: list[State] = []
    if preset_name is not None:
        chosen = preset(str(preset_name))
        base = chosen.params
        initial_states = list(chosen.initial_states)

    overrides = {}
    for key in [k for k in entries if k.startswith("model.")]:
        short = key.split(".", 1)[1]
        if short not in MODEL_KEYS:
            raise ConfigError(f"field {key}: unknown model parameter")
        value = entries.pop(key)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"field {key}: expected a number, got {value!r}")
        overrides[MODEL_KEYS[short]] = float(value)
    if base is None:
        missing = sorted(
            set(ModelParams.__dataclass_fields__) - set(overrides)
        )
        if missing:
            raise ConfigError(
                "model is underspecified: set model.preset or all of "
                + ", ".join(missing)
            )
        params = ModelParams(**overrides)
    else:
        params = base.replace(**overrides) if overrides else base

    if "run.initial_states" in entries:
        initial_states = _as_states(entries.pop("run.initial_states"), "run.initial_states")
    if not initial_states:
        initial_states = [State(30.0, 5.0, 10.0)]

    alphas = tuple(
        _as_float_list(entries.pop("solver.alpha", list(DEFAULT_ALPHAS)), "solver.alpha")
    )
    step = float(entries.pop("solver.step", DEFAULT_STEP))
    t_end = float(entries.pop("solver.t_end", DEFAULT_T_END))
    iterations = int(entries.pop("solver.corrector_iterations", 1))
    window = entries.pop("solver.memory_window", None)
    out_dir = Path(str(entries.pop("output.directory", "out")))
    fmt = str(entries.pop("output.format", "csv"))

    if entries:
        unknown = ", ".join(sorted(entries))
        raise ConfigError(f"unknown configuration keys: {unknown}")

    return RunConfig(
        params=params,
        alphas=alphas,
        initial_states=tuple(initial_states),
        step=step,
        t_end=t_end,
        corrector_iterations=iterations,
        memory_window=None if window is None else int(window),
        out_dir=out_dir,
        output_format=fmt,
        preset_name=None if preset_name is None else str(preset_name),
    )


def load_config(path: Path | str) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    return config_from_entries(parse_config_text(text))
