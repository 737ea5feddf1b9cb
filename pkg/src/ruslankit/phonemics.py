"""Rule-based grapheme-to-phoneme transcription for normalized Russian
text, plus corpus-level phoneme frequency statistics.

The 42-label inventory and the rule order are the published contract of
this module (see ``docs/phoneme_inventory.md``):

  1. letter-to-base-phone mapping,
  2. palatalization before soft vowels / soft sign,
  3. word-final obstruent devoicing,
  4. regressive voicing assimilation in clusters,
  5. two-degree unstressed vowel reduction.

Stress comes from an optional combining acute (U+0301) after the vowel;
"ё" is always stressed; otherwise the first syllable is assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .charset import Charset
from .errors import EmptyCorpus, NotNormalized
from .textnorm import filter_charset

STRESS_MARK = "́"

_PAIRED = "бвгдзклмнпрстф"  # consonants with a palatalized partner
_HARD_ONLY = {"ж": "ʐ", "ш": "ʂ", "ц": "ts", "х": "x"}
_SOFT_ONLY = {"ч": "tɕ", "щ": "ɕː", "й": "j"}

_BASE = {c: c_lat for c, c_lat in zip(_PAIRED, "bvgdzklmnprstf")}

VOWEL_LABELS = ("a", "o", "u", "e", "i", "ɨ", "ə")
CONSONANT_LABELS = tuple(
    sorted({_BASE[c] for c in _PAIRED}
           | {_BASE[c] + "ʲ" for c in _PAIRED}
           | set(_HARD_ONLY.values()) | set(_SOFT_ONLY.values()))
)

# voiced <-> voiceless obstruent partners (soft variants included)
_DEVOICE = {"b": "p", "v": "f", "g": "k", "d": "t", "z": "s", "ʐ": "ʂ"}
_DEVOICE.update({k + "ʲ": v + "ʲ" for k, v in list(_DEVOICE.items()) if k != "ʐ"})
_VOICE = {v: k for k, v in _DEVOICE.items()}
_VOICELESS_UNPAIRED = {"ts", "tɕ", "ɕː", "x"}
_OBSTRUENTS = set(_DEVOICE) | set(_VOICE) | _VOICELESS_UNPAIRED

_VOWEL_LETTERS = set("аоуэыиеёюя")
_SOFT_VOWEL_LETTERS = set("еёюяи")
_IOTATED = {"я": "a", "ю": "u", "е": "e", "ё": "o"}
_PLAIN = {"а": "a", "о": "o", "у": "u", "э": "e", "ы": "ɨ", "и": "i"}


@dataclass(frozen=True)
class PhonemeInventory:
    """Fixed, versioned label set partitioned into vowels and consonants."""

    vowels: tuple[str, ...] = VOWEL_LABELS
    consonants: tuple[str, ...] = CONSONANT_LABELS

    @property
    def labels(self) -> tuple[str, ...]:
        return self.vowels + self.consonants

    def classify(self, label: str) -> str:
        if label in self.vowels:
            return "vowel"
        if label in self.consonants:
            return "consonant"
        raise KeyError(label)


INVENTORY = PhonemeInventory()
assert len(INVENTORY.labels) == 42


@dataclass(frozen=True)
class PhonemeString:
    """Per-word phoneme label sequences; word boundaries are implicit in
    the outer tuple."""

    words: tuple[tuple[str, ...], ...]

    @property
    def phones(self) -> tuple[str, ...]:
        return tuple(p for word in self.words for p in word)

    def __len__(self) -> int:
        return len(self.phones)


def _stress_positions(letters: list[str], marks: set[int]) -> int:
    """Index (into `letters`) of the stressed vowel, -1 for none."""
    vowel_idx = [i for i, c in enumerate(letters) if c in _VOWEL_LETTERS]
    if not vowel_idx:
        return -1
    for i in vowel_idx:
        if letters[i] == "ё":
            return i
    for i in vowel_idx:
        if i in marks:
            return i
    return vowel_idx[0]  # first-syllable default


def _transcribe_word(word: str) -> tuple[str, ...]:
    # separate letters from combining stress marks
    letters: list[str] = []
    marked: set[int] = set()
    for ch in word:
        if ch == STRESS_MARK:
            if letters:
                marked.add(len(letters) - 1)
        else:
            letters.append(ch)
    if not letters:
        return ()

    stressed_letter = _stress_positions(letters, marked)

    # pass 1: letter-to-base-phone mapping with palatalization; vowels
    # remember their source letter and syllable ordinal for reduction
    phones: list[str] = []
    sources: list[str] = []      # vowel source letter, "" for consonants
    syllable_of: list[int] = []  # vowel ordinal per phone, -1 for consonants
    vowel_count = 0
    stressed_syllable = -1

    def emit(label: str, source: str = "", syllable: int = -1) -> None:
        phones.append(label)
        sources.append(source)
        syllable_of.append(syllable)

    for i, ch in enumerate(letters):
        prev = letters[i - 1] if i > 0 else ""
        if ch in _PAIRED:
            nxt = letters[i + 1] if i + 1 < len(letters) else ""
            soft = nxt in _SOFT_VOWEL_LETTERS or nxt == "ь"
            emit(_BASE[ch] + ("ʲ" if soft else ""))
        elif ch in _HARD_ONLY:
            emit(_HARD_ONLY[ch])
        elif ch in _SOFT_ONLY:
            emit(_SOFT_ONLY[ch])
        elif ch in _VOWEL_LETTERS:
            boundary = i == 0 or prev in _VOWEL_LETTERS or prev in "ьъ"
            if (ch in _IOTATED and boundary) or (ch == "и" and prev == "ь"):
                emit("j")
            base = _IOTATED.get(ch) or _PLAIN[ch]
            if ch == "и" and prev in ("ж", "ш", "ц"):
                base = "ɨ"  # жи/ши/ци are hard
            if i == stressed_letter:
                stressed_syllable = vowel_count
            emit(base, source=ch, syllable=vowel_count)
            vowel_count += 1
        # ь and ъ carry no phone of their own

    # pass 2: word-final devoicing
    if phones and phones[-1] in _DEVOICE:
        phones[-1] = _DEVOICE[phones[-1]]

    # pass 3: regressive voicing assimilation, right to left; v never
    # triggers voicing of its neighbour
    for i in range(len(phones) - 2, -1, -1):
        cur, nxt = phones[i], phones[i + 1]
        if cur not in _DEVOICE and cur not in _VOICE:
            continue
        if nxt not in _OBSTRUENTS or nxt in ("v", "vʲ"):
            continue
        if nxt in _DEVOICE:  # voiced neighbour
            if cur in _VOICE:
                phones[i] = _VOICE[cur]
        else:  # voiceless neighbour
            if cur in _DEVOICE:
                phones[i] = _DEVOICE[cur]

    # pass 4: two-degree reduction of unstressed vowels
    reduced: list[str] = []
    for i, label in enumerate(phones):
        syl = syllable_of[i]
        if syl < 0 or syl == stressed_syllable:
            reduced.append(label)
            continue
        src = sources[i]
        pretonic = stressed_syllable >= 0 and syl == stressed_syllable - 1
        word_initial = i == 0
        if src in ("а", "о"):
            reduced.append("a" if pretonic or word_initial else "ə")
        elif src in ("е", "э", "я"):
            prev = phones[i - 1] if i > 0 else ""
            reduced.append("ɨ" if prev in ("ʐ", "ʂ", "ts") else "i")
        else:  # и, ы, у, ю, ё keep their quality
            reduced.append(label)
    return tuple(reduced)


def transcribe(text: str, charset: Charset | None = None) -> PhonemeString:
    """Deterministic phonemic transcription of normalized text.

    Raises NotNormalized if the input (stress marks aside) is not already
    in filtered charset form.
    """
    stripped = text.replace(STRESS_MARK, "")
    if filter_charset(stripped, charset) != stripped:
        raise NotNormalized("input must be normalized charset-only text")

    words = []
    current: list[str] = []
    for ch in text.lower():
        if ch in _VOWEL_LETTERS or ch in _PAIRED or ch in _HARD_ONLY \
                or ch in _SOFT_ONLY or ch in "ьъ" or ch == STRESS_MARK:
            current.append(ch)
        else:
            if current:
                words.append("".join(current))
                current = []
    if current:
        words.append("".join(current))

    out = tuple(w for w in (_transcribe_word(word) for word in words) if w)
    return PhonemeString(words=out)


def phoneme_distribution(texts, charset: Charset | None = None) -> dict[str, float]:
    """Relative phoneme frequencies pooled over all transcriptions."""
    counts: dict[str, int] = {}
    total = 0
    for text in texts:
        for phone in transcribe(text, charset).phones:
            counts[phone] = counts.get(phone, 0) + 1
            total += 1
    if total == 0:
        raise EmptyCorpus("no phonemes in any utterance")
    return {p: c / total for p, c in counts.items()}


def write_distribution(dist: dict[str, float], path: str | Path) -> None:
    """Two-column `phoneme<TAB>frequency` export, sorted by frequency
    descending (ties broken by label for determinism)."""
    rows = sorted(dist.items(), key=lambda kv: (-kv[1], kv[0]))
    lines = [f"{p}\t{f:.9f}" for p, f in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
