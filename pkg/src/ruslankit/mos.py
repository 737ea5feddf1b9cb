"""Mean Opinion Score survey protocol: blind randomized survey assembly,
rating persistence, and per-kind aggregation.

The paper protocol presents 20 samples per survey — 11 synthesized and
9 real — rated 1..5 on two axes (naturalness, intelligibility).  Ratings
persist to an append-only JSON-lines log; the materialized view applies
last-write-wins per (respondent, sample, axis).
"""

from __future__ import annotations

import json
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import PoolInvalid, ScoreOutOfRange, UnknownSample

KINDS = ("real", "synthesized")
AXES = ("naturalness", "intelligibility")
PAPER_REAL_COUNT = 9
PAPER_SYNTH_COUNT = 11
_KIND_LEAK_MARKERS = ("real", "synth", "ориг", "синтез")


@dataclass(frozen=True)
class PoolEntry:
    sample_id: str
    audio_path: str
    kind: str  # "real" | "synthesized"


@dataclass(frozen=True)
class SamplePool:
    """Survey sample inventory; ids must not hint at the sample kind."""

    entries: tuple[PoolEntry, ...]

    def __post_init__(self):
        ids = [e.sample_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise PoolInvalid("duplicate sample ids in pool")
        for entry in self.entries:
            if entry.kind not in KINDS:
                raise PoolInvalid(f"{entry.sample_id}: kind must be one of {KINDS}")
            lowered = entry.sample_id.lower()
            if any(marker in lowered for marker in _KIND_LEAK_MARKERS):
                raise PoolInvalid(f"sample id {entry.sample_id!r} leaks its kind")

    def kind_of(self, sample_id: str) -> str:
        for entry in self.entries:
            if entry.sample_id == sample_id:
                return entry.kind
        raise UnknownSample(f"sample {sample_id!r} not in pool")

    def __contains__(self, sample_id: str) -> bool:
        return any(e.sample_id == sample_id for e in self.entries)

    def count(self, kind: str) -> int:
        return sum(1 for e in self.entries if e.kind == kind)

    def require_paper_protocol(self) -> None:
        real, synth = self.count("real"), self.count("synthesized")
        if (real, synth) != (PAPER_REAL_COUNT, PAPER_SYNTH_COUNT):
            raise PoolInvalid(f"survey template needs {PAPER_REAL_COUNT} real + "
                              f"{PAPER_SYNTH_COUNT} synthesized samples, "
                              f"got {real} + {synth}")

    @classmethod
    def from_file(cls, path: str | Path) -> "SamplePool":
        """JSON array of {sampleId, audioPath, kind} objects."""
        try:
            raw = json.loads(Path(path).read_text("utf-8"))
        except (json.JSONDecodeError, OSError) as exc:
            raise PoolInvalid(f"{path}: {exc}") from None
        if not isinstance(raw, list):
            raise PoolInvalid(f"{path}: expected a JSON array")
        entries = []
        for item in raw:
            try:
                entries.append(PoolEntry(item["sampleId"], item["audioPath"], item["kind"]))
            except (KeyError, TypeError) as exc:
                raise PoolInvalid(f"{path}: bad pool entry {item!r} ({exc})") from None
        return cls(tuple(entries))


def create_survey(pool: SamplePool, respondent_id: str, seed: int,
                  enforce_paper_counts: bool = True) -> list[PoolEntry]:
    """Deterministic seeded permutation of the whole pool for one
    respondent.  Callers serving respondents must strip the kind field."""
    if not pool.entries:
        raise PoolInvalid("empty sample pool")
    if enforce_paper_counts:
        pool.require_paper_protocol()
    order = list(pool.entries)
    random.Random(seed).shuffle(order)
    return order


@dataclass(frozen=True)
class Rating:
    respondent_id: str
    sample_id: str
    axis: str
    score: int
    timestamp: float

    def key(self) -> tuple[str, str, str]:
        return (self.respondent_id, self.sample_id, self.axis)


def _validate_rating(rating: Rating, pool: SamplePool) -> None:
    if rating.sample_id not in pool:
        raise UnknownSample(f"sample {rating.sample_id!r} not in pool")
    if rating.axis not in AXES:
        raise ScoreOutOfRange(f"axis must be one of {AXES}, got {rating.axis!r}")
    if not isinstance(rating.score, int) or isinstance(rating.score, bool) \
            or not 1 <= rating.score <= 5:
        raise ScoreOutOfRange(f"score must be an integer in 1..5, got {rating.score!r}")


class RatingStore:
    """Append-only JSONL log with an in-memory last-write-wins view.

    All writes funnel through one lock; reads hit the materialized dict.
    The log replays on startup, so restarts lose no ratings.
    """

    def __init__(self, log_path: str | Path, pool: SamplePool):
        self._path = Path(log_path)
        self._pool = pool
        self._lock = threading.Lock()
        self._view: dict[tuple[str, str, str], Rating] = {}
        if self._path.exists():
            self._replay()

    def _replay(self) -> None:
        for line in self._path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            rating = Rating(doc["respondentId"], doc["sampleId"], doc["axis"],
                            int(doc["score"]), float(doc["timestamp"]))
            if rating.sample_id in self._pool:  # pool may have shrunk
                self._view[rating.key()] = rating

    def submit(self, rating: Rating) -> Rating:
        """Validate, append to the log, update the view; resubmission
        overwrites by (respondent, sample, axis)."""
        _validate_rating(rating, self._pool)
        line = json.dumps({
            "respondentId": rating.respondent_id,
            "sampleId": rating.sample_id,
            "axis": rating.axis,
            "score": rating.score,
            "timestamp": rating.timestamp,
        }, ensure_ascii=False)
        with self._lock:
            with open(self._path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
                f.flush()
            self._view[rating.key()] = rating
        return rating

    def ratings(self) -> list[Rating]:
        with self._lock:
            return list(self._view.values())

    def __len__(self) -> int:
        return len(self._view)


def submit_rating(store: RatingStore, respondent_id: str, sample_id: str,
                  axis: str, score: int, timestamp: float | None = None) -> Rating:
    rating = Rating(respondent_id, sample_id, axis, score,
                    time.time() if timestamp is None else timestamp)
    return store.submit(rating)


@dataclass(frozen=True)
class MosCell:
    kind: str
    axis: str
    count: int
    mean: float | None

    @property
    def rendered(self) -> str:
        """Two-decimal rendering used in the score table."""
        return "-" if self.mean is None else f"{self.mean:.2f}"


@dataclass(frozen=True)
class MosReport:
    cells: tuple[MosCell, ...] = field(default=())

    def cell(self, kind: str, axis: str) -> MosCell:
        for c in self.cells:
            if c.kind == kind and c.axis == axis:
                return c
        raise KeyError((kind, axis))

    def as_dict(self) -> dict:
        return {"cells": [{"kind": c.kind, "axis": c.axis, "count": c.count,
                           "mean": c.mean, "rendered": c.rendered}
                          for c in self.cells]}

    def render_table(self) -> str:
        """Plain-text score table: one row per kind, one column per axis."""
        lines = ["type\t" + "\t".join(AXES)]
        for kind in KINDS:
            row = [kind] + [self.cell(kind, axis).rendered for axis in AXES]
            lines.append("\t".join(row))
        return "\n".join(lines)


def aggregate(ratings: list[Rating], pool: SamplePool) -> MosReport:
    """Arithmetic mean per (kind, axis); empty cells keep count 0 and no
    mean.  Permutation-invariant and stable under resubmission replay."""
    sums: dict[tuple[str, str], float] = {}
    counts: dict[tuple[str, str], int] = {}
    for rating in ratings:
        if rating.sample_id not in pool:
            continue
        key = (pool.kind_of(rating.sample_id), rating.axis)
        sums[key] = sums.get(key, 0.0) + rating.score
        counts[key] = counts.get(key, 0) + 1
    cells = []
    for kind in KINDS:
        for axis in AXES:
            n = counts.get((kind, axis), 0)
            mean = sums[(kind, axis)] / n if n else None
            cells.append(MosCell(kind, axis, n, mean))
    return MosReport(tuple(cells))
