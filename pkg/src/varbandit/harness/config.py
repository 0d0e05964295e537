"""Declarative experiment configuration: loading, overrides, validation, hashing."""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from varbandit.environments import Bernoulli, distribution_from_dict
from varbandit.errors import ConfigError, InputError
from varbandit.policies import BAI_POLICIES, BERNOULLI_ONLY, make_policy

DEFAULT_REPLICATIONS = {"regret": 100, "bai": 2000, "case_study": 50, "bound_sweep": 10_000}


def load_schema() -> dict:
    text = resources.files("varbandit.harness").joinpath("experiment.schema.json").read_text("utf-8")
    return json.loads(text)


_VALIDATOR = None


def _validator():
    global _VALIDATOR
    if _VALIDATOR is None:
        schema = load_schema()
        _VALIDATOR = jsonschema.Draft202012Validator(schema)
    return _VALIDATOR


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``dotted.key=value`` overrides; values parse as JSON when possible."""
    out = copy.deepcopy(raw)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, text = item.split("=", 1)
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = out
        parts = key.split(".")
        for p in parts[:-1]:
            if isinstance(node, list):
                node = node[int(p)]
            else:
                node = node.setdefault(p, {})
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
    return out


def config_hash(raw: dict) -> str:
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict

    @property
    def kind(self) -> str:
        return self.raw["kind"]

    @property
    def replications(self) -> int:
        return self.raw["replications"]

    @property
    def base_seed(self) -> int:
        return self.raw["base_seed"]

    @property
    def workers(self) -> int | None:
        return self.raw.get("workers")

    @property
    def arms(self):
        return [distribution_from_dict(d) for d in self.raw.get("arms", [])]

    @property
    def policy_descriptors(self) -> list[dict]:
        return self.raw.get("policies", [])

    def make_policies(self):
        return [make_policy(d) for d in self.policy_descriptors]

    def get(self, key, default=None):
        return self.raw.get(key, default)

    @property
    def hash(self) -> str:
        return config_hash(self.raw)


def validate(raw: dict) -> ExperimentConfig:
    """Schema check followed by semantic checks; raises :class:`ConfigError` on the first violation."""
    errors = sorted(_validator().iter_errors(raw), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {err.message}")
    cfg = ExperimentConfig(raw)
    try:
        arms = cfg.arms
        policies = cfg.make_policies()
    except InputError as exc:
        raise ConfigError(str(exc)) from None
    names = [d["name"] for d in cfg.policy_descriptors]
    if cfg.kind == "bai":
        bad = [n for n in names if n not in BAI_POLICIES]
        if bad:
            raise ConfigError(f"policies {bad} cannot run a fixed-budget identification experiment")
        if "arms" in raw and len(arms) < 2:
            raise ConfigError("identification needs at least two arms")
    elif cfg.kind == "regret":
        bad = [n for n in names if n in BAI_POLICIES]
        if bad:
            raise ConfigError(f"identification policies {bad} are only valid in bai experiments")
        if any(n in BERNOULLI_ONLY for n in names) and not all(isinstance(a, Bernoulli) for a in arms):
            raise ConfigError("kl_ucb requires Bernoulli arms")
        labels = [p.label for p in policies]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"policy labels must be unique: {labels}")
    elif cfg.kind == "case_study":
        if raw.get("shortlist", 8) >= raw.get("stocks", 100):
            raise ConfigError("shortlist must be smaller than the number of stocks")
    return cfg


def load_config(path, overrides=None) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")  # OSError propagates: the CLI maps it to exit 4
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    validate(raw)
    if overrides:
        raw = apply_overrides(raw, overrides)
        validate(raw)
    return ExperimentConfig(raw)
