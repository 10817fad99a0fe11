"""Registry of role prompts and draft schemas, addressable by task name.

Assets live in the ``prompts/`` directory next to this module: one
``<task>.txt`` drafter prompt and one ``<task>.schema.json`` draft
schema per base task, plus the shared reviewer / searcher prompts and
the verdict / cross-examination / ballot schemas.  Instantiated task
names like ``advantage-2`` or ``rebuttal-2AC`` resolve to their base
asset (``advantage``, ``rebuttal``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .gateway import SchemaSpec

_ASSET_DIR = Path(__file__).parent / "prompts"

BASE_TASKS = (
    "plantext",
    "harms",
    "inherency",
    "solvency",
    "advantage",
    "strategy",
    "topicality",
    "disadvantage",
    "counterplan",
    "kritik",
    "oncase",
    "rebuttal",
)


def prompts_version() -> str:
    return (_ASSET_DIR / "VERSION").read_text(encoding="utf-8").strip()


def base_task(task_name: str) -> str:
    """``advantage-2`` -> ``advantage``; unknown names raise KeyError."""
    if task_name in BASE_TASKS:
        return task_name
    stem = task_name.split("-", 1)[0]
    if stem in BASE_TASKS:
        return stem
    raise KeyError(f"unknown task {task_name!r}")


@lru_cache(maxsize=None)
def _text(name: str) -> str:
    return (_ASSET_DIR / f"{name}.txt").read_text(encoding="utf-8").strip()


@lru_cache(maxsize=None)
def _schema(name: str) -> SchemaSpec:
    return SchemaSpec(json.loads((_ASSET_DIR / f"{name}.schema.json").read_text(encoding="utf-8")))


@dataclass(frozen=True)
class TaskAssets:
    task_name: str
    drafter_prompt: str
    reviewer_prompt: str
    searcher_prompt: str
    draft_schema: SchemaSpec
    verdict_schema: SchemaSpec


def load_task(task_name: str) -> TaskAssets:
    base = base_task(task_name)
    return TaskAssets(
        task_name=task_name,
        drafter_prompt=_text(base),
        reviewer_prompt=_text("reviewer"),
        searcher_prompt=_text("searcher"),
        draft_schema=_schema(base),
        verdict_schema=_schema("verdict"),
    )


def cx_question_schema() -> SchemaSpec:
    return _schema("cx_question")


def cx_answer_schema() -> SchemaSpec:
    return _schema("cx_answer")


def ballot_schema() -> SchemaSpec:
    return _schema("ballot")


def cx_prompt(role: str) -> str:
    return _text("cx_questioner" if role == "questioner" else "cx_answerer")


def judge_prompt() -> str:
    return _text("judge")
