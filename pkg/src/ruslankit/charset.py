"""The fixed 78-symbol text alphabet and its index bijection.

Symbol order is the embedding-table row order and is frozen: space, then
the eleven punctuation marks in codepoint order, then the 33 Cyrillic
capitals, then the 33 lowercase letters.  The canonical definition ships
as ``data/charset_v1.txt`` (one symbol per line, 78 lines).
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BadCharset, IndexOutOfRange, UnknownSymbol

CYRILLIC_UPPER = "АБВГДЕЁЖЗИЙКЛМНОПРСТУФХЦЧШЩЪЫЬЭЮЯ"
CYRILLIC_LOWER = "абвгдеёжзийклмнопрстуфхцчшщъыьэюя"
PUNCTUATION = "!'(),-.:;?—"

CHARSET_SIZE = 78
_DATA_FILE = "charset_v1.txt"


@dataclass(frozen=True)
class Charset:
    """Ordered alphabet with a symbol <-> index bijection."""

    symbols: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.symbols) != CHARSET_SIZE:
            raise BadCharset(f"expected {CHARSET_SIZE} symbols, got {len(self.symbols)}")
        if len(set(self.symbols)) != len(self.symbols):
            raise BadCharset("duplicate symbols in charset")
        for sym in self.symbols:
            if len(sym) != 1:
                raise BadCharset(f"symbol {sym!r} is not a single character")
        missing = [c for c in CYRILLIC_UPPER + CYRILLIC_LOWER + " " if c not in self.symbols]
        if missing:
            raise BadCharset(f"charset lacks required symbols: {missing!r}")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def __len__(self) -> int:
        return len(self.symbols)

    def index_of(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnknownSymbol(f"symbol {symbol!r} is not in the charset") from None

    def symbol_at(self, index: int) -> str:
        if not 0 <= index < len(self.symbols):
            raise IndexOutOfRange(f"index {index} outside [0, {len(self.symbols)})")
        return self.symbols[index]

    @classmethod
    def from_file(cls, path: str | Path) -> "Charset":
        lines = Path(path).read_text(encoding="utf-8").split("\n")
        if lines and lines[-1] == "":
            lines = lines[:-1]
        return cls(tuple(lines))

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.symbols) + "\n", encoding="utf-8")

    @classmethod
    def default(cls) -> "Charset":
        """The versioned 78-symbol alphabet shipped with the package."""
        text = importlib.resources.files("ruslankit").joinpath("data", _DATA_FILE).read_text("utf-8")
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines = lines[:-1]
        return cls(tuple(lines))
