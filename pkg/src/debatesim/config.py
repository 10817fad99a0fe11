"""Operator configuration: one JSON file, environment overrides, flags.

Precedence is flags > environment > file.  Environment variables use the
``DEBATESIM_`` prefix with upper-cased field names (``DEBATESIM_CORPUS``,
``DEBATESIM_OUTPUT_DIR``, ...).  Model profiles and the judge roster live
only in the file; provider credentials come from each provider's own
environment variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .delivery import TtsProfile
from .gateway import Gateway, ModelProfile, ScriptedProvider, default_providers
from .pipeline import Engines

ENV_PREFIX = "DEBATESIM_"

_INT_FIELDS = {"year_pin", "max_iterations", "evidence_k", "advantage_count", "cx_pairs", "repair_budget"}


@dataclass
class CliConfig:
    corpus: str | None = None
    index: str | None = None
    output_dir: str = "out"
    year_pin: int = 2022
    max_iterations: int = 3
    evidence_k: int = 25
    advantage_count: int = 2
    cx_pairs: int = 4
    repair_budget: int = 2
    mock_script: str | None = None
    resolution: str | None = None
    speech_profile: str = "speech"
    judges: list[str] = field(default_factory=list)
    profiles: dict = field(default_factory=dict)
    tts: dict | None = None

    def profile(self, name: str) -> ModelProfile:
        try:
            spec = self.profiles[name]
        except KeyError:
            raise KeyError(
                f"profile {name!r} not in config (have: {sorted(self.profiles)})"
            ) from None
        return ModelProfile(**spec)

    def judge_profiles(self) -> list[ModelProfile]:
        return [self.profile(name) for name in self.judges]

    def tts_profile(self, provider_override: str | None = None) -> TtsProfile:
        spec = dict(self.tts or {})
        if provider_override:
            spec["provider"] = provider_override
        return TtsProfile(**spec) if spec else TtsProfile()


def load_config(path: str | Path | None, overrides: dict | None = None, env: dict | None = None) -> CliConfig:
    """Merge file, environment, and flag overrides (flags win)."""
    env = env if env is not None else os.environ
    merged: dict = {}

    if path is None:
        path = env.get(ENV_PREFIX + "CONFIG")
    if path is not None:
        merged.update(json.loads(Path(path).read_text(encoding="utf-8")))

    known = {f.name for f in fields(CliConfig)}
    for name in known:
        env_value = env.get(ENV_PREFIX + name.upper())
        if env_value is not None:
            merged[name] = int(env_value) if name in _INT_FIELDS else env_value

    for name, value in (overrides or {}).items():
        if value is not None:
            merged[name] = value

    merged = {k: v for k, v in merged.items() if k in known}
    return CliConfig(**merged)


def build_gateway(config: CliConfig, mock_script: str | None = None) -> Gateway:
    providers = default_providers()
    script = mock_script or config.mock_script
    if script:
        providers["script"] = ScriptedProvider.from_file(script)
    return Gateway(providers=providers)


def build_engines(config: CliConfig, mock_script: str | None = None) -> Engines:
    from .corpus import load_corpus
    from .indexing import build_index, load_index

    if not config.corpus:
        raise ValueError("no corpus configured (set corpus in config, DEBATESIM_CORPUS, or --corpus)")
    corpus, _report = load_corpus(config.corpus)
    if config.index and Path(config.index).exists():
        index = load_index(config.index)
    else:
        index = build_index(corpus)
    return Engines(corpus=corpus, index=index, gateway=build_gateway(config, mock_script))
