"""Rank-frequency tables from plain-text corpora.

The tokenizer is deliberately simple: a token is a run of letters, with
apostrophes allowed between letters ("don't"), case-folded by default.
Gutenberg headers are not stripped unless asked for.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .stats import RankFrequencyTable

_LETTERS = r"[^\W\d_]+"
DEFAULT_PATTERN = re.compile(rf"{_LETTERS}(?:['’]{_LETTERS})*")


class CorpusDecodeError(ValueError):
    def __init__(self, source: str, offset: int, reason: str):
        super().__init__(f"{source}: undecodable input at byte {offset}: {reason}")
        self.source = source
        self.offset = offset


@dataclass(frozen=True)
class TokenizerConfig:
    fold_case: bool = True
    pattern: re.Pattern = DEFAULT_PATTERN


def tokenize(text: str, rules: TokenizerConfig = TokenizerConfig()) -> Iterator[str]:
    for m in rules.pattern.finditer(text):
        tok = m.group(0)
        yield tok.casefold() if rules.fold_case else tok


def read_text(path, skip_lines: int = 0, start_marker: str | None = None,
              end_marker: str | None = None) -> str:
    """Decode a UTF-8 file, optionally trimming to the body between two marker lines.

    With ``start_marker``, text up to and including the first line containing
    it is dropped; with ``end_marker``, text from the first line containing it
    onward is dropped.
    """
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CorpusDecodeError(str(path), e.start, e.reason) from None
    lines = text.splitlines(keepends=True)[skip_lines:]
    if start_marker is not None:
        for i, line in enumerate(lines):
            if start_marker in line:
                lines = lines[i + 1:]
                break
        else:
            raise ValueError(f"{path}: start marker {start_marker!r} not found")
    if end_marker is not None:
        for i, line in enumerate(lines):
            if end_marker in line:
                lines = lines[:i]
                break
    return "".join(lines)


@dataclass(frozen=True, eq=False)
class CorpusTable:
    table: RankFrequencyTable
    types: list
    counts: list
    token_count: int
    source_name: str

    @property
    def type_count(self) -> int:
        return len(self.types)

    def relative_frequencies(self) -> list[float]:
        return [c / self.token_count for c in self.counts]

    def rows(self):
        for r, (t, c) in enumerate(zip(self.types, self.counts), start=1):
            yield r, t, c


def build_corpus_table(tokens: Iterable[str], source_name: str = "") -> CorpusTable:
    counter = Counter(tokens)
    items = sorted(counter.items(), key=lambda tc: (-tc[1], tc[0]))
    counts = [c for _, c in items]
    types = [t for t, _ in items]
    table = RankFrequencyTable.from_values(counts, "corpus", labels=types) if counts else \
        RankFrequencyTable([], "corpus", labels=[])
    return CorpusTable(table, types, counts, sum(counts), source_name)


def corpus_from_file(path, rules: TokenizerConfig = TokenizerConfig(), **trim) -> CorpusTable:
    return build_corpus_table(tokenize(read_text(path, **trim), rules), Path(path).name)
