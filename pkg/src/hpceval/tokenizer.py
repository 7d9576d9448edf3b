"""Lightweight tokenization for source text.

The token counts used by the corpus filters and the context windows used
by the pragma extractor both go through a pluggable tokenizer so a real
subword vocabulary can be dropped in later.  The default implementation
is a vocabulary-free approximation: identifiers, number literals, and
individual punctuation characters each count as one token, whitespace
only separates.
"""

from __future__ import annotations

import re
from typing import Protocol

# Identifier, then number (int/float/hex with common suffixes), then any
# single non-space character.  Order matters: alternatives are tried left
# to right at each position.
_TOKEN_RE = re.compile(
    r"[A-Za-z_][A-Za-z_0-9]*"
    r"|0[xX][0-9a-fA-F]+[uUlL]*"
    r"|\d+\.\d*(?:[eE][+-]?\d+)?[fFlL]?"
    r"|\.\d+(?:[eE][+-]?\d+)?[fFlL]?"
    r"|\d+(?:[eE][+-]?\d+)?[uUlLfF]*"
    r"|\S"
)


class Tokenizer(Protocol):
    """Anything that can count tokens and report their spans."""

    def count(self, text: str) -> int: ...

    def spans(self, text: str) -> list[tuple[int, int]]: ...


class SimpleTokenizer:
    """Regex tokenizer over identifiers, numbers, and punctuation.

    Deliberately not a subword vocabulary: counts are approximate stand-ins
    for BPE token counts, adequate for threshold filters and context
    windows.
    """

    def tokenize(self, text: str) -> list[str]:
        return _TOKEN_RE.findall(text)

    def count(self, text: str) -> int:
        return sum(1 for _ in _TOKEN_RE.finditer(text))

    def spans(self, text: str) -> list[tuple[int, int]]:
        """(start, end) character offsets of each token, in order."""
        return [m.span() for m in _TOKEN_RE.finditer(text)]

    def tail(self, text: str, max_tokens: int) -> str:
        """Suffix of ``text`` containing at most the last ``max_tokens`` tokens.

        The cut lands at a token boundary; leading whitespace of the suffix
        is preserved only from the first kept token onward.
        """
        if max_tokens <= 0:
            return ""
        all_spans = self.spans(text)
        if len(all_spans) <= max_tokens:
            return text
        start = all_spans[len(all_spans) - max_tokens][0]
        return text[start:]


DEFAULT_TOKENIZER = SimpleTokenizer()
