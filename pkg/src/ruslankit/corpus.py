"""Manifest ingestion, validation, corpus statistics, histograms, and
charset text encoding.

Manifest format: UTF-8, LF line endings, one `id|audioPath|text` record
per line.  A word is a maximal run of Cyrillic letters; symbols are all
charset characters including spaces and punctuation (spaces can be
excluded via the counting switch).
"""

from __future__ import annotations

import math
import re
import wave as _wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio import wav_duration
from .charset import Charset
from .errors import DuplicateId, EmptyCorpus, MalformedLine, MissingAudio
from .textnorm import _CAPITAL_RUN, AcronymLexicon

_ID_PATTERN = re.compile(r"[a-z0-9_-]+")
_WORD = re.compile(r"[А-ЯЁа-яё]+")


@dataclass
class Utterance:
    """One text-audio training pair."""

    utterance_id: str
    audio_path: Path
    text: str
    _duration: float | None = field(default=None, repr=False)

    @property
    def duration(self) -> float:
        """Seconds, from the WAV header; cached after first read."""
        if self._duration is None:
            self._duration = wav_duration(self.audio_path)
        return self._duration


def load_manifest(path: str | Path, root: str | Path | None = None) -> list[Utterance]:
    """Parse `id|audioPath|text` lines; audio paths resolve against `root`
    (defaults to the manifest's directory)."""
    path = Path(path)
    base = Path(root) if root is not None else path.parent
    utterances: list[Utterance] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(path.read_text("utf-8").split("\n"), 1):
        if raw == "":
            continue
        parts = raw.split("|")
        if len(parts) != 3:
            raise MalformedLine(line_no, f"expected id|path|text, got {len(parts)} fields")
        utt_id, rel_path, text = parts
        if not _ID_PATTERN.fullmatch(utt_id):
            raise MalformedLine(line_no, f"bad id {utt_id!r}")
        if utt_id in seen:
            raise DuplicateId(f"line {line_no}: duplicate id {utt_id!r}")
        seen.add(utt_id)
        audio = base / rel_path
        if not audio.is_file():
            raise MissingAudio(f"line {line_no}: {audio} does not exist")
        utterances.append(Utterance(utt_id, audio, text))
    return utterances


@dataclass(frozen=True)
class Violation:
    utterance_id: str
    category: str  # charset | audio | duration | acronym | empty-text
    detail: str


def validate(corpus: list[Utterance], charset: Charset | None = None,
             lexicon: AcronymLexicon | None = None) -> list[Violation]:
    """Exhaustive validation report; never fail-fast."""
    charset = charset or Charset.default()
    lexicon = lexicon or AcronymLexicon.empty()
    findings: list[Violation] = []
    for utt in corpus:
        if not utt.text:
            findings.append(Violation(utt.utterance_id, "empty-text", "text is empty"))
        bad = sorted({c for c in utt.text if c not in charset})
        if bad:
            findings.append(Violation(utt.utterance_id, "charset",
                                      f"out-of-charset symbols: {''.join(bad)!r}"))
        for run in _CAPITAL_RUN.findall(utt.text):
            if run not in lexicon.entries:
                findings.append(Violation(utt.utterance_id, "acronym",
                                          f"unexpanded capital run {run!r}"))
        findings.extend(_check_audio(utt))
    return findings


def _check_audio(utt: Utterance) -> list[Violation]:
    try:
        with _wave.open(str(utt.audio_path), "rb") as wav:
            channels = wav.getnchannels()
            width = wav.getsampwidth()
            rate = wav.getframerate()
            frames = wav.getnframes()
            comp = wav.getcomptype()
    except (OSError, _wave.Error, EOFError) as exc:
        return [Violation(utt.utterance_id, "audio", f"unreadable: {exc}")]
    out = []
    if comp != "NONE" or width != 2 or channels != 1:
        out.append(Violation(utt.utterance_id, "audio",
                             f"not mono 16-bit PCM (channels={channels}, "
                             f"width={8 * width}, comp={comp})"))
    if rate != 44100:
        out.append(Violation(utt.utterance_id, "audio",
                             f"sample rate {rate}, expected 44100"))
    if frames == 0:
        out.append(Violation(utt.utterance_id, "duration", "zero-duration audio"))
    return out


@dataclass(frozen=True)
class CorpusStats:
    sample_count: int
    total_duration: float
    total_symbols: int
    total_words: int
    unique_words: int
    min_duration: float
    max_duration: float
    min_symbols: int
    max_symbols: int
    min_words: int
    max_words: int

    @property
    def duration_hms(self) -> str:
        total = round(self.total_duration)
        return f"{total // 3600}:{total % 3600 // 60:02d}:{total % 60:02d}"

    def as_dict(self) -> dict:
        return {
            "sampleCount": self.sample_count,
            "totalDuration": round(self.total_duration, 3),
            "totalDurationHms": self.duration_hms,
            "totalSymbols": self.total_symbols,
            "totalWords": self.total_words,
            "uniqueWords": self.unique_words,
            "minDuration": round(self.min_duration, 3),
            "maxDuration": round(self.max_duration, 3),
            "minSymbols": self.min_symbols,
            "maxSymbols": self.max_symbols,
            "minWords": self.min_words,
            "maxWords": self.max_words,
        }


def count_words(text: str) -> list[str]:
    return _WORD.findall(text)


def count_symbols(text: str, charset: Charset, count_spaces: bool = True) -> int:
    return sum(1 for c in text if c in charset and (count_spaces or c != " "))


def compute_stats(corpus: list[Utterance], charset: Charset | None = None,
                  count_spaces: bool = True) -> CorpusStats:
    if not corpus:
        raise EmptyCorpus("statistics need at least one utterance")
    charset = charset or Charset.default()
    durations = [utt.duration for utt in corpus]
    symbol_counts = [count_symbols(utt.text, charset, count_spaces) for utt in corpus]
    word_lists = [count_words(utt.text) for utt in corpus]
    word_counts = [len(w) for w in word_lists]
    unique = {w.lower() for words in word_lists for w in words}
    return CorpusStats(
        sample_count=len(corpus),
        # fsum is correctly rounded, so the total is permutation-invariant
        total_duration=math.fsum(durations),
        total_symbols=sum(symbol_counts),
        total_words=sum(word_counts),
        unique_words=len(unique),
        min_duration=float(min(durations)),
        max_duration=float(max(durations)),
        min_symbols=min(symbol_counts),
        max_symbols=max(symbol_counts),
        min_words=min(word_counts),
        max_words=max(word_counts),
    )


@dataclass(frozen=True)
class HistogramSpec:
    axis: str  # "duration" or "symbols"
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]


def histogram(corpus: list[Utterance], axis: str, bin_count: int,
              charset: Charset | None = None) -> HistogramSpec:
    """Equal-width bins over [min, max]; the last bin is right-inclusive."""
    if not corpus:
        raise EmptyCorpus("histogram needs at least one utterance")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    if axis == "duration":
        values = np.array([utt.duration for utt in corpus])
    elif axis == "symbols":
        charset = charset or Charset.default()
        values = np.array([count_symbols(utt.text, charset) for utt in corpus], dtype=float)
    else:
        raise ValueError(f"unknown axis {axis!r}")
    counts, edges = np.histogram(values, bins=bin_count,
                                 range=(values.min(), values.max()))
    return HistogramSpec(axis, tuple(float(e) for e in edges),
                         tuple(int(c) for c in counts))


def write_histogram(spec: HistogramSpec, path: str | Path) -> None:
    """Two-column `bin_start<TAB>count` export for external plotting; the
    final line carries the right edge with an empty count."""
    lines = [f"{spec.bin_edges[i]:.6f}\t{spec.counts[i]}" for i in range(len(spec.counts))]
    lines.append(f"{spec.bin_edges[-1]:.6f}\t")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def encode_text(text: str, charset: Charset | None = None) -> list[int]:
    charset = charset or Charset.default()
    return [charset.index_of(c) for c in text]


def decode_ids(ids, charset: Charset | None = None) -> str:
    charset = charset or Charset.default()
    return "".join(charset.symbol_at(i) for i in ids)
