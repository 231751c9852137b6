"""Experiment configuration: JSON schema, validation, defaults.

A config document selects a scenario and its parameters:

    {
      "scenario": "illustrative",        # required; see scenarios.SCENARIOS
      "rule": "atu",                     # atu | ml | fb | bayes | riid | bonferroni
      "epsilon": 0.05, "alpha": 0.05, "bonferroni": false,
      "space": ["1", "0"],               # outcome labels, optional
      "truth": {"prefix": [], "tail": {"iid": [0.8, 0.2]}},       # optional
      "initial": {"box": {"cycle": [[[0.6, 1.0], [0.0, 0.4]]]}},  # optional
      "n": 500, "reps": 500, "seed": 7,
      "output": {"path": "report.csv", "format": "csv"},
      ... scenario-specific keys (mode, budget, problems, pstar, delta,
          theta_star, psis, theta, sigmas, model_epsilon)
    }

Omitted fields fall back to scenario defaults.  Validation errors carry the
offending field and its 1-based line in the source text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .dgp import (
    DgpFamily,
    IndependentDgp,
    OutcomeSpace,
    binary_space,
    dgp_from_json,
    dgp_to_json,
    family_from_json,
    family_to_json,
    space_to_json,
)
from .errors import ConfigError, RobustUpdateError
from .updating import UpdateParams

RULES = ("atu", "ml", "fb", "bayes", "riid", "bonferroni")
SCENARIO_NAMES = (
    "illustrative",
    "coverage",
    "dominance",
    "bayes_counterexample",
    "regret_example",
    "bernoulli_model",
    "gaussian_model",
    "theorem2_demo",
)
FORMATS = ("csv", "json")

_COMMON_KEYS = {"scenario", "rule", "epsilon", "alpha", "bonferroni", "space",
                "truth", "initial", "n", "reps", "seed", "output"}
_SCENARIO_KEYS: dict[str, set[str]] = {
    "illustrative": set(),
    "coverage": set(),
    "dominance": {"problems"},
    "bayes_counterexample": set(),
    "regret_example": {"pstar"},
    "bernoulli_model": {"delta", "theta_star", "psis"},
    "gaussian_model": {"theta", "sigmas", "model_epsilon"},
    "theorem2_demo": {"mode", "budget"},
}

_DEFAULT_RULE = {
    "illustrative": "atu",
    "coverage": "riid",
    "dominance": "atu",
    "bayes_counterexample": "bayes",
    "regret_example": "atu",
    "bernoulli_model": "riid",
    "gaussian_model": "atu",
    "theorem2_demo": "atu",
}
_DEFAULT_N = {
    "illustrative": 500,
    "coverage": 1000,
    "dominance": 1,
    "bayes_counterexample": 300,
    "regret_example": 1,
    "bernoulli_model": 1000,
    "gaussian_model": 10000,
    "theorem2_demo": 1,
}
_DEFAULT_REPS = {
    "illustrative": 500,
    "coverage": 2000,
    "dominance": 100,
    "bayes_counterexample": 500,
    "regret_example": 1,
    "bernoulli_model": 500,
    "gaussian_model": 500,
    "theorem2_demo": 1,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated, defaults-resolved experiment description."""

    scenario: str
    rule: str
    update: UpdateParams
    space: OutcomeSpace
    truth: IndependentDgp | None
    initial: DgpFamily | None
    n: int
    reps: int
    seed: int
    extra: dict = field(default_factory=dict)
    out_path: str | None = None
    out_format: str = "json"

    def echo(self) -> dict:
        """Scientific parameters only (no output destination), for embedding
        in reports; identical configs echo to identical dicts."""
        doc: dict[str, Any] = {
            "scenario": self.scenario,
            "rule": self.rule,
            "epsilon": self.update.epsilon,
            "alpha": self.update.alpha,
            "bonferroni": self.update.bonferroni,
            "space": space_to_json(self.space),
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
        }
        if self.truth is not None:
            doc["truth"] = dgp_to_json(self.truth)
        if self.initial is not None:
            doc["initial"] = family_to_json(self.initial)
        for k in sorted(self.extra):
            doc[k] = self.extra[k]
        return doc


def _find_line(text: str, path: tuple[str, ...]) -> int | None:
    """Best-effort 1-based line of the deepest locatable key along the path."""
    pos = 0
    line = None
    for key in path:
        idx = text.find(f'"{key}"', pos)
        if idx == -1:
            break
        line = text.count("\n", 0, idx) + 1
        pos = idx
    return line


class _Checker:
    def __init__(self, doc: dict, text: str) -> None:
        self.doc = doc
        self.text = text

    def fail(self, message: str, *path: str) -> ConfigError:
        return ConfigError(message, field=".".join(path) or None,
                           line=_find_line(self.text, path))

    def get(self, key: str, default: Any) -> Any:
        return self.doc.get(key, default)

    def get_int(self, key: str, default: int, minimum: int) -> int:
        v = self.get(key, default)
        if isinstance(v, bool) or not isinstance(v, int):
            raise self.fail(f"expected an integer, got {v!r}", key)
        if v < minimum:
            raise self.fail(f"must be >= {minimum}, got {v}", key)
        return v

    def get_number(self, key: str, default: float, lo: float | None = None,
                   hi: float | None = None, strict_lo: bool = False) -> float:
        v = self.get(key, default)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise self.fail(f"expected a number, got {v!r}", key)
        v = float(v)
        if lo is not None and (v <= lo if strict_lo else v < lo):
            op = ">" if strict_lo else ">="
            raise self.fail(f"must be {op} {lo}, got {v}", key)
        if hi is not None and v > hi:
            raise self.fail(f"must be <= {hi}, got {v}", key)
        return v

    def get_choice(self, key: str, default: str, choices: tuple[str, ...]) -> str:
        v = self.get(key, default)
        if v not in choices:
            raise self.fail(f"must be one of {', '.join(choices)}; got {v!r}", key)
        return v


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON config document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    c = _Checker(doc, text)

    scenario = c.get_choice("scenario", "", SCENARIO_NAMES)
    allowed = _COMMON_KEYS | _SCENARIO_KEYS[scenario]
    for key in doc:
        if key not in allowed:
            raise c.fail(f"unknown key for scenario {scenario!r}", key)

    rule = c.get_choice("rule", _DEFAULT_RULE[scenario], RULES)
    if scenario == "coverage" and rule not in ("riid", "bonferroni"):
        raise c.fail("coverage supports only riid or bonferroni", "rule")

    epsilon = c.get_number("epsilon", 0.05, lo=0.0, strict_lo=True)
    alpha = c.get_number("alpha", 0.05, lo=0.0, hi=1.0, strict_lo=True)
    if not alpha < 1.0:
        raise c.fail(f"must be < 1, got {alpha}", "alpha")
    bonferroni = c.get("bonferroni", False)
    if not isinstance(bonferroni, bool):
        raise c.fail(f"expected true/false, got {bonferroni!r}", "bonferroni")
    update = UpdateParams(epsilon=epsilon, alpha=alpha,
                          bonferroni=bonferroni or rule == "bonferroni")

    space_obj = c.get("space", None)
    try:
        space = binary_space() if space_obj is None else OutcomeSpace(tuple(space_obj))
    except (RobustUpdateError, TypeError) as exc:
        raise c.fail(str(exc), "space") from exc

    truth = None
    if "truth" in doc:
        try:
            truth = dgp_from_json(space, doc["truth"])
        except (RobustUpdateError, KeyError, TypeError) as exc:
            raise c.fail(f"invalid DGP: {exc}", "truth") from exc
    initial = None
    if "initial" in doc:
        try:
            initial = family_from_json(space, doc["initial"])
        except (RobustUpdateError, KeyError, TypeError) as exc:
            raise c.fail(f"invalid family: {exc}", "initial") from exc

    n = c.get_int("n", _DEFAULT_N[scenario], minimum=1)
    reps = c.get_int("reps", _DEFAULT_REPS[scenario], minimum=1)
    seed = c.get_int("seed", 0, minimum=0)

    out_path: str | None = None
    out_format = "json"
    if "output" in doc:
        out = doc["output"]
        if not isinstance(out, dict):
            raise c.fail("output must be an object", "output")
        for key in out:
            if key not in ("path", "format"):
                raise c.fail("unknown output key", "output", key)
        if "path" in out:
            if not isinstance(out["path"], str):
                raise c.fail("path must be a string", "output", "path")
            out_path = out["path"]
        if "format" in out:
            if out["format"] not in FORMATS:
                raise c.fail(f"format must be one of {', '.join(FORMATS)}",
                             "output", "format")
            out_format = out["format"]

    extra: dict[str, Any] = {}
    if scenario == "dominance":
        extra["problems"] = c.get_int("problems", 10000, minimum=1)
    elif scenario == "regret_example":
        extra["pstar"] = c.get_number("pstar", 0.62, lo=0.0, hi=1.0)
    elif scenario == "bernoulli_model":
        extra["delta"] = c.get_number("delta", 0.2, lo=0.0, hi=1.0)
        extra["theta_star"] = c.get_number("theta_star", 0.4, lo=0.0, hi=1.0)
        psis = c.get("psis", [0.2, 0.9])
        if (not isinstance(psis, list) or not psis
                or not all(isinstance(p, (int, float)) and not isinstance(p, bool)
                           and 0.0 <= p <= 1.0 for p in psis)):
            raise c.fail("psis must be a nonempty list of numbers in [0, 1]", "psis")
        extra["psis"] = [float(p) for p in psis]
    elif scenario == "gaussian_model":
        extra["theta"] = c.get_number("theta", 0.0)
        sigmas = c.get("sigmas", [0.5, 2.0])
        if (not isinstance(sigmas, list) or not sigmas
                or not all(isinstance(s, (int, float)) and not isinstance(s, bool)
                           and s > 0.0 for s in sigmas)):
            raise c.fail("sigmas must be a nonempty list of positive numbers", "sigmas")
        extra["sigmas"] = [float(s) for s in sigmas]
        extra["model_epsilon"] = c.get_number("model_epsilon", 0.1,
                                              lo=0.0, strict_lo=True)
    elif scenario == "theorem2_demo":
        extra["mode"] = c.get_choice("mode", "shipped",
                                     ("shipped", "mixture", "identity"))
        extra["budget"] = c.get_int("budget", 50000, minimum=1)

    return ExperimentConfig(scenario=scenario, rule=rule, update=update,
                            space=space, truth=truth, initial=initial,
                            n=n, reps=reps, seed=seed, extra=extra,
                            out_path=out_path, out_format=out_format)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
