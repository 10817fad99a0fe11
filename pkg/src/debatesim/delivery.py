"""Spoken-script realization and text-to-speech synthesis.

A speech's spoken script is exactly its spoken-mode rendering: the
argument, the cite, and the highlighted spans of each card (full body
when a card carries no highlights); original tags are never voiced.
Synthesis chunks scripts at sentence boundaries under the provider's
input limit, synthesizes each chunk, and concatenates the audio in
order; the chunks cover the script text exactly once.
"""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

from .arguments import Speech, render_speech
from .corpus import CorpusHandle
from .gateway import AuthMissing, ProviderError, Timeout
from .slots import SpeechSlot

logger = logging.getLogger(__name__)

WORDS_PER_SECOND = 2.5  # ~150 wpm conversational delivery

DEFAULT_VOICES = {"AFF": "alloy", "NEG": "onyx"}


@dataclass(frozen=True)
class SpokenScript:
    slot: SpeechSlot
    text: str
    voice_id: str
    estimated_duration: float | None = None

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("spoken script must be non-empty")


@dataclass(frozen=True)
class SpeechAudio:
    slot: SpeechSlot
    audio_bytes: bytes
    format: str
    voice_id: str

    def __post_init__(self) -> None:
        if not self.audio_bytes:
            raise ValueError("audio payload must be non-empty")


@dataclass(frozen=True)
class TtsProfile:
    provider: str = "openai"
    model_name: str = "gpt-4o-mini-tts"
    audio_format: str = "mp3"
    input_char_limit: int = 4000
    request_timeout: float = 120.0
    voices: dict = field(default_factory=lambda: dict(DEFAULT_VOICES))

    def voice_for(self, slot: SpeechSlot) -> str:
        return self.voices.get(slot.side, next(iter(self.voices.values())))


def realize_script(speech: Speech, corpus: CorpusHandle, voice_id: str = "alloy") -> SpokenScript:
    """Pure function of (speech, corpus): the spoken-mode rendering."""
    text = render_speech(speech, corpus, "spoken")
    words = len(text.split())
    return SpokenScript(
        slot=speech.slot,
        text=text,
        voice_id=voice_id,
        estimated_duration=round(words / WORDS_PER_SECOND, 1),
    )


_SENTENCE_END = re.compile(r"[.!?]+(?:\s+|$)")


def split_sentences(text: str) -> list[str]:
    """Sentence pieces whose concatenation is exactly ``text``."""
    pieces = []
    start = 0
    for match in _SENTENCE_END.finditer(text):
        pieces.append(text[start : match.end()])
        start = match.end()
    if start < len(text):
        pieces.append(text[start:])
    return pieces


def chunk_text(text: str, limit: int) -> list[str]:
    """Greedy sentence packing under ``limit`` characters per chunk.

    Oversized sentences fall back to whitespace splits, then hard
    character splits; ``"".join(chunks) == text`` always holds.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    chunks: list[str] = []
    current = ""
    for piece in split_sentences(text):
        while len(piece) > limit:
            cut = piece.rfind(" ", 1, limit)  # space must fit inside the chunk
            cut = cut + 1 if cut > 0 else limit
            if current:
                chunks.append(current)
                current = ""
            chunks.append(piece[:cut])
            piece = piece[cut:]
        if current and len(current) + len(piece) > limit:
            chunks.append(current)
            current = piece
        else:
            current += piece
    if current:
        chunks.append(current)
    return chunks


class MockTts:
    """Deterministic offline synthesizer; wraps each chunk in byte
    markers so tests can verify chunk order and coverage."""

    def synthesize_chunk(self, text: str, profile: TtsProfile, voice: str) -> bytes:
        return b"[" + text.encode("utf-8") + b"]"


class OpenAiTts:
    """OpenAI speech API client; credential checked before any request."""

    ENV_VAR = "OPENAI_API_KEY"

    def __init__(self, base_url: str | None = None):
        self.base_url = base_url or "https://api.openai.com/v1"

    def synthesize_chunk(self, text: str, profile: TtsProfile, voice: str) -> bytes:
        key = os.environ.get(self.ENV_VAR)
        if not key:
            raise AuthMissing(f"set {self.ENV_VAR} to use the openai TTS provider")
        import httpx

        try:
            resp = httpx.post(
                f"{self.base_url}/audio/speech",
                json={
                    "model": profile.model_name,
                    "voice": voice,
                    "input": text,
                    "response_format": profile.audio_format,
                },
                headers={"Authorization": f"Bearer {key}"},
                timeout=profile.request_timeout,
            )
        except httpx.TimeoutException as exc:
            raise Timeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise ProviderError(str(exc), transient=True) from exc
        if resp.status_code >= 400:
            raise ProviderError(f"{resp.status_code}: {resp.text[:200]}")
        return resp.content


def tts_client_for(profile: TtsProfile):
    if profile.provider == "mock":
        return MockTts()
    if profile.provider == "openai":
        return OpenAiTts()
    raise ValueError(f"unknown tts provider {profile.provider!r}")


def synthesize(script: SpokenScript, profile: TtsProfile, client=None) -> SpeechAudio:
    """Chunk, synthesize, and concatenate one speech's audio."""
    client = client or tts_client_for(profile)
    chunks = chunk_text(script.text, profile.input_char_limit)
    started = time.monotonic()
    parts = [client.synthesize_chunk(chunk, profile, script.voice_id) for chunk in chunks]
    logger.info(
        "synthesized %s: %d chunks, %d bytes, %.1fs",
        script.slot.code, len(chunks), sum(len(p) for p in parts), time.monotonic() - started,
    )
    return SpeechAudio(
        slot=script.slot,
        audio_bytes=b"".join(parts),
        format=profile.audio_format,
        voice_id=script.voice_id,
    )


def audio_path(output_dir: str | Path, round_id: str, slot: SpeechSlot, audio_format: str) -> Path:
    return Path(output_dir) / "rounds" / round_id / "audio" / f"{slot.code}.{audio_format}"


def write_audio(audio: SpeechAudio, output_dir: str | Path, round_id: str) -> Path:
    path = audio_path(output_dir, round_id, audio.slot, audio.format)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(audio.audio_bytes)
    return path
