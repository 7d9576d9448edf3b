"""Mine OpenMP-annotated loops and score predicted pragmas.

Two halves that meet in the middle:

* extraction walks corpus files, lifts every ``for`` loop annotated with
  ``#pragma omp parallel for``, and formats training samples where the
  pragma is moved behind the loop after a ``<begin-omp>`` separator;
* scoring parses pragma strings into a normalized clause set so that
  predictions can be judged both on exact text and on functional
  equivalence (clause order, variable order, and the ``schedule`` clause
  do not matter).

Extraction is lexical, not a C++ parser: braces and parens are matched
with comment/string awareness, preprocessor conditionals are taken as
written, and anything that cannot be matched is skipped and counted.
"""

from __future__ import annotations

import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import CorpusIndex
from .providers import _CODE, _lex
from .tokenizer import DEFAULT_TOKENIZER, Tokenizer

log = logging.getLogger(__name__)

BEGIN_OMP = "<begin-omp>"
DIRECTIVE = "parallel for"
CONTEXT_TOKEN_BUDGET = 500

# Only schedule is dropped for functional comparison by default; the set
# is a parameter because reasonable checkers disagree on what else is
# performance-only.
DEFAULT_IGNORABLE = frozenset({"schedule"})

_VAR_LIST_CLAUSES = frozenset({"private", "firstprivate", "lastprivate", "shared"})

_DIRECTIVE_RE = re.compile(r"\s*#\s*pragma\s+omp\s+parallel\s+for(?![A-Za-z0-9_])")
_PRAGMA_LINE_RE = re.compile(r"(?m)^[ \t]*#[ \t]*pragma[ \t]+omp\b")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class PragmaParseError(ValueError):
    """Raised when a pragma string does not fit the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


@dataclass(frozen=True)
class LoopSample:
    """One annotated loop: preceding context, the loop, and its pragma."""

    context: str
    loop_text: str
    pragma_text: str

    def __post_init__(self):
        if not _DIRECTIVE_RE.match(self.pragma_text):
            raise ValueError(
                "pragma_text must start with '#pragma omp parallel for': "
                f"{self.pragma_text[:60]!r}"
            )
        if not self.loop_text.startswith("for"):
            raise ValueError("loop_text must start with a for statement")


@dataclass(frozen=True)
class PragmaAST:
    """Normalized pragma: fixed directive plus an unordered clause set.

    Each clause is a ``(name, payload)`` tuple.  Payloads are ``None`` for
    bare clauses, a frozenset of variable names for list clauses, an
    ``(operator, frozenset)`` pair for reduction (one entry per operator),
    and a whitespace-stripped string for everything else, unknown clauses
    included.
    """

    directive: str
    clauses: frozenset

    def clause_names(self) -> frozenset:
        return frozenset(name for name, _ in self.clauses)


@dataclass(frozen=True)
class PragmaPrediction:
    """A scored prediction against its reference pragma."""

    sample_id: str
    predicted_text: str
    reference_text: str
    exact: bool
    functional: bool

    def __post_init__(self):
        if self.exact and not self.functional:
            raise ValueError("exact match implies functional match")


@dataclass(frozen=True)
class ExtractionResult:
    samples: tuple
    skipped_regions: int
    files_scanned: int


# ---------------------------------------------------------------------------
# pragma grammar


def _strip_all_ws(s: str) -> str:
    return "".join(s.split())


def _normalize_ws(s: str) -> str:
    return " ".join(s.split())


def _split_top_commas(payload: str, base: int) -> list:
    """Split on commas outside any paren/bracket nesting."""
    parts = []
    depth = 0
    start = 0
    for i, ch in enumerate(payload):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise PragmaParseError("unbalanced bracket in clause", base + i)
        elif ch == "," and depth == 0:
            parts.append(payload[start:i])
            start = i + 1
    parts.append(payload[start:])
    return parts


def _balanced_payload(text: str, i: int) -> tuple:
    """Return (inner text, index past ')') for the paren group at text[i]."""
    assert text[i] == "("
    depth = 0
    j = i
    n = len(text)
    while j < n:
        ch = text[j]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return text[i + 1 : j], j + 1
        elif ch in "'\"":
            quote = ch
            j += 1
            while j < n and text[j] != quote:
                if text[j] == "\\":
                    j += 1
                j += 1
            if j >= n:
                raise PragmaParseError("unterminated literal in clause", i)
        j += 1
    raise PragmaParseError("unbalanced parentheses in clause", i)


def parse_pragma(text: str) -> PragmaAST:
    """Parse a ``#pragma omp parallel for`` line into a PragmaAST.

    Whitespace-insensitive.  Repeated variable-list clauses merge into one
    set; repeated reduction clauses merge per operator.  Unknown clause
    names are kept with their payload verbatim (modulo whitespace).
    """
    m = _DIRECTIVE_RE.match(text)
    if not m:
        raise PragmaParseError("expected '#pragma omp parallel for'", 0)
    i = m.end()
    n = len(text)

    var_lists: dict = {}
    reductions: dict = {}
    other: set = set()

    while True:
        while i < n and (text[i].isspace() or text[i] == ","):
            i += 1
        if i >= n:
            break
        ident = _IDENT_RE.match(text, i)
        if not ident:
            raise PragmaParseError(f"expected clause name, found {text[i]!r}", i)
        name = ident.group(0)
        i = ident.end()
        j = i
        while j < n and text[j].isspace():
            j += 1
        payload = None
        payload_pos = j
        if j < n and text[j] == "(":
            payload, i = _balanced_payload(text, j)

        if name in _VAR_LIST_CLAUSES:
            if payload is None:
                raise PragmaParseError(f"{name} requires a variable list", payload_pos)
            bucket = var_lists.setdefault(name, set())
            for var in _split_top_commas(payload, payload_pos):
                v = _strip_all_ws(var)
                if not v:
                    raise PragmaParseError(f"empty variable in {name}", payload_pos)
                bucket.add(v)
        elif name == "reduction":
            if payload is None:
                raise PragmaParseError("reduction requires (op : list)", payload_pos)
            op_part, sep, list_part = payload.partition(":")
            if not sep:
                raise PragmaParseError("reduction needs 'op : list'", payload_pos)
            op = _strip_all_ws(op_part)
            if not op:
                raise PragmaParseError("empty reduction operator", payload_pos)
            bucket = reductions.setdefault(op, set())
            for var in _split_top_commas(list_part, payload_pos):
                v = _strip_all_ws(var)
                if not v:
                    raise PragmaParseError("empty variable in reduction", payload_pos)
                bucket.add(v)
        else:
            # collapse/num_threads/schedule/default/if, bare nowait and
            # ordered, and any unknown clause all land here: the payload is
            # compared as whitespace-stripped text.
            other.add((name, _strip_all_ws(payload) if payload is not None else None))

    entries = set(other)
    for name, vs in var_lists.items():
        entries.add((name, frozenset(vs)))
    for op, vs in reductions.items():
        entries.add(("reduction", (op, frozenset(vs))))
    return PragmaAST(directive=DIRECTIVE, clauses=frozenset(entries))


def render_pragma(ast: PragmaAST) -> str:
    """Deterministic text for an AST; parsing it back yields an equal AST."""
    rendered = []
    for name, payload in ast.clauses:
        if payload is None:
            rendered.append(name)
        elif isinstance(payload, frozenset):
            rendered.append(f"{name}({','.join(sorted(payload))})")
        elif isinstance(payload, tuple):
            op, vs = payload
            rendered.append(f"{name}({op}:{','.join(sorted(vs))})")
        else:
            rendered.append(f"{name}({payload})")
    return " ".join([f"#pragma omp {ast.directive}"] + sorted(rendered))


def functionally_equivalent(
    a: PragmaAST, b: PragmaAST, ignorable: frozenset = DEFAULT_IGNORABLE
) -> bool:
    """Equality after dropping ignorable clauses; order never matters."""
    if a.directive != b.directive:
        return False
    keep_a = frozenset(c for c in a.clauses if c[0] not in ignorable)
    keep_b = frozenset(c for c in b.clauses if c[0] not in ignorable)
    return keep_a == keep_b


def exact_match(predicted: str, reference: str) -> bool:
    """Whitespace-normalized string equality."""
    return _normalize_ws(predicted) == _normalize_ws(reference)


def evaluate_prediction(
    sample_id: str,
    predicted: str,
    reference: str,
    ignorable: frozenset = DEFAULT_IGNORABLE,
) -> PragmaPrediction:
    """Judge one prediction on both axes.

    Identical text is functionally correct by definition, parseable or
    not; otherwise both sides must parse and compare equal.
    """
    exact = exact_match(predicted, reference)
    if exact:
        functional = True
    else:
        try:
            functional = functionally_equivalent(
                parse_pragma(predicted), parse_pragma(reference), ignorable
            )
        except PragmaParseError:
            functional = False
    return PragmaPrediction(
        sample_id=sample_id,
        predicted_text=predicted,
        reference_text=reference,
        exact=exact,
        functional=functional,
    )


def evaluate_predictions(
    rows: Iterable, ignorable: frozenset = DEFAULT_IGNORABLE
) -> tuple:
    """Evaluate (id, predicted, reference) rows.

    Returns (predictions, unparseable_count) where the count is the number
    of predicted texts the grammar rejected.
    """
    preds = []
    unparseable = 0
    for row in rows:
        pred = evaluate_prediction(
            row["id"], row["predicted"], row["reference"], ignorable
        )
        preds.append(pred)
        try:
            parse_pragma(row["predicted"])
        except PragmaParseError:
            unparseable += 1
    return preds, unparseable


def score(preds: Sequence, mode: str) -> float:
    """Accuracy = correct / total under the chosen notion of correct."""
    if not preds:
        raise ValueError("no predictions to score")
    if mode == "exact":
        correct = sum(1 for p in preds if p.exact)
    elif mode == "functional":
        correct = sum(1 for p in preds if p.functional)
    else:
        raise ValueError(f"mode must be 'exact' or 'functional', got {mode!r}")
    return correct / len(preds)


# ---------------------------------------------------------------------------
# loop extraction


def _skip_ws_comments(text: str, i: int) -> int:
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == "/" and i + 1 < n and text[i + 1] == "/":
            nl = text.find("\n", i)
            i = n if nl == -1 else nl + 1
        elif ch == "/" and i + 1 < n and text[i + 1] == "*":
            close = text.find("*/", i + 2)
            if close == -1:
                return n
            i = close + 2
        else:
            break
    return i


def _match_group(text: str, start: int, open_ch: str, close_ch: str):
    """Index past the group's closing char, or None if never balanced."""
    depth = 0
    for off, (ch, state) in enumerate(_lex(text[start:])):
        if state != _CODE:
            continue
        if ch == open_ch:
            depth += 1
        elif ch == close_ch:
            depth -= 1
            if depth == 0:
                return start + off + 1
    return None


def _logical_line_end(text: str, start: int) -> int:
    """End offset of a preprocessor line, following backslash splices."""
    i = start
    n = len(text)
    while True:
        nl = text.find("\n", i)
        if nl == -1:
            return n
        if text[i:nl].rstrip(" \t").endswith("\\"):
            i = nl + 1
        else:
            return nl


def _fold_logical_line(text: str) -> str:
    return _normalize_ws(re.sub(r"\\[ \t]*\n", " ", text))


def _capture_loop(text: str, i: int):
    """End offset of the for statement at text[i], or None.

    Covers ``for (...) { ... }`` and braceless bodies ending at the first
    top-level ';' or the first complete top-level brace block (so chained
    braceless loops resolve to the innermost block).  An ``else`` tail
    after a braced ``if`` body is beyond this matcher.
    """
    n = len(text)
    j = _skip_ws_comments(text, i + 3)
    if j >= n or text[j] != "(":
        return None
    j = _match_group(text, j, "(", ")")
    if j is None:
        return None
    body = _skip_ws_comments(text, j)
    if body >= n:
        return None
    depth = 0
    for off, (ch, state) in enumerate(_lex(text[body:])):
        if state != _CODE:
            continue
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == ";" and depth == 0:
            return body + off + 1
        elif ch == "{" and depth == 0:
            return _match_group(text, body + off, "{", "}")
    return None


def extract_from_text(
    text: str,
    tokenizer: Tokenizer = DEFAULT_TOKENIZER,
    context_tokens: int = CONTEXT_TOKEN_BUDGET,
) -> tuple:
    """All (sample, skip) extraction for one file's content.

    Returns (samples, skipped_regions).  A region is skipped when a
    parallel-for pragma is not followed by a matchable for loop.
    """
    samples = []
    skipped = 0
    for m in _PRAGMA_LINE_RE.finditer(text):
        line_start = m.start()
        hash_pos = text.index("#", line_start)
        line_end = _logical_line_end(text, hash_pos)
        pragma_text = _fold_logical_line(text[hash_pos:line_end])
        if not _DIRECTIVE_RE.match(pragma_text):
            continue

        i = _skip_ws_comments(text, line_end)
        # hop over stacked directives between the pragma and its loop
        while i < len(text) and text[i] == "#":
            i = _skip_ws_comments(text, _logical_line_end(text, i))
        if not text.startswith("for", i) or (
            i + 3 < len(text) and (text[i + 3].isalnum() or text[i + 3] == "_")
        ):
            skipped += 1
            continue
        end = _capture_loop(text, i)
        if end is None:
            skipped += 1
            continue
        samples.append(
            LoopSample(
                context=tokenizer.tail(text[:line_start], context_tokens),
                loop_text=text[i:end],
                pragma_text=pragma_text,
            )
        )
    return samples, skipped


def extract_loops(
    index: CorpusIndex,
    tokenizer: Tokenizer = DEFAULT_TOKENIZER,
    context_tokens: int = CONTEXT_TOKEN_BUDGET,
    max_workers: int = 8,
) -> ExtractionResult:
    """Extract annotated loops from every file in a corpus index.

    Files are processed in a bounded pool and merged in index order, so
    output order is deterministic.  Unreadable files count as one skipped
    region each.
    """

    def one(source) -> tuple:
        try:
            content = Path(source.path).read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            log.warning("skipping %s: %s", source.path, exc)
            return [], 1
        return extract_from_text(content, tokenizer, context_tokens)

    samples = []
    skipped = 0
    workers = max(1, min(max_workers, len(index.files) or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for file_samples, file_skipped in pool.map(one, index.files):
            samples.extend(file_samples)
            skipped += file_skipped
    return ExtractionResult(
        samples=tuple(samples), skipped_regions=skipped, files_scanned=len(index.files)
    )


# ---------------------------------------------------------------------------
# sample formatting and interchange


def format_sample(sample: LoopSample) -> str:
    """Training text: context, loop, separator, then the pragma.

    Splitting the result on the separator token recovers pragma_text
    byte-for-byte, which is why text containing the token is refused.
    """
    for field in (sample.context, sample.loop_text, sample.pragma_text):
        if BEGIN_OMP in field:
            raise ValueError(f"sample text contains the separator {BEGIN_OMP!r}")
    return f"{sample.context}{sample.loop_text} {BEGIN_OMP} {sample.pragma_text}"


def write_dataset(samples: Iterable, path) -> int:
    """Write loop samples as JSONL; returns the number written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            row = {"context": s.context, "loop": s.loop_text, "pragma": s.pragma_text}
            fh.write(json.dumps(row, sort_keys=True) + "\n")
            count += 1
    return count


def read_dataset(path) -> list:
    samples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            samples.append(
                LoopSample(
                    context=row["context"],
                    loop_text=row["loop"],
                    pragma_text=row["pragma"],
                )
            )
    return samples


def write_training_text(samples: Iterable, path) -> int:
    """Concatenate formatted samples, blank line between them."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            if count:
                fh.write("\n\n")
            fh.write(format_sample(s))
            count += 1
        if count:
            fh.write("\n")
    return count


def read_predictions(path) -> list:
    """Rows of {id, predicted, reference} from a predictions JSONL file."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            rows.append(
                {
                    "id": str(row["id"]),
                    "predicted": row["predicted"],
                    "reference": row["reference"],
                }
            )
    return rows
