"""Speech slots and the canonical order of a round.

Eight speeches (1AC, 1NC, 2AC, 2NC, 1NR, 1AR, 2NR, 2AR) with a
cross-examination after each of the four constructives, giving twelve
items.  The questioner of each CX is the conventional one: the debater
on the opposing team who is not about to speak next.
"""

from __future__ import annotations

from dataclasses import dataclass

SPEECH_CODES = ("1AC", "1NC", "2AC", "2NC", "1NR", "1AR", "2NR", "2AR")
CONSTRUCTIVES = ("1AC", "1NC", "2AC", "2NC")

# constructive -> slot code of its conventional cross-examiner
CX_QUESTIONER = {"1AC": "2NC", "1NC": "1AC", "2AC": "1NC", "2NC": "2AC"}


@dataclass(frozen=True)
class SpeechSlot:
    code: str

    def __post_init__(self) -> None:
        if self.code not in SPEECH_CODES:
            raise ValueError(f"unknown speech slot {self.code!r}")

    @property
    def side(self) -> str:
        return "AFF" if self.code[1] == "A" else "NEG"

    @property
    def is_constructive(self) -> bool:
        return self.code in CONSTRUCTIVES


@dataclass(frozen=True)
class RoundItem:
    """One entry of the canonical order: a speech or the CX following one."""

    kind: str  # "speech" | "cx"
    slot: SpeechSlot

    def __post_init__(self) -> None:
        if self.kind not in ("speech", "cx"):
            raise ValueError(f"unknown item kind {self.kind!r}")
        if self.kind == "cx" and not self.slot.is_constructive:
            raise ValueError(f"no cross-examination after {self.slot.code}")

    @property
    def code(self) -> str:
        return self.slot.code if self.kind == "speech" else f"CX-{self.slot.code}"


def canonical_order() -> list[RoundItem]:
    """The twelve items of a round: CX after each constructive only."""
    items: list[RoundItem] = []
    for code in SPEECH_CODES:
        slot = SpeechSlot(code)
        items.append(RoundItem("speech", slot))
        if slot.is_constructive:
            items.append(RoundItem("cx", slot))
    return items


def item_by_code(code: str) -> RoundItem:
    for item in canonical_order():
        if item.code == code:
            return item
    raise ValueError(f"unknown round item {code!r}")
