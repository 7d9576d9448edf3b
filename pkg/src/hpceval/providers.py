"""Completion providers: file replay, HTTP endpoint, deterministic oracle.

A provider answers a CompletionRequest with exactly n results, each either
a Completion or a CompletionError.  Nothing downstream needs to know which
backend produced them, so canned-text oracles, replayed files, and a live
inference server are interchangeable in the benchmark harness.
"""

from __future__ import annotations

import hashlib
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import requests

logger = logging.getLogger(__name__)

DEFAULT_MAX_NEW_TOKENS = 512
DEFAULT_TEMPERATURE = 0.2
DEFAULT_TOP_P = 0.93

ENDPOINT_ENV_VAR = "HPCEVAL_ENDPOINT"
TOKEN_ENV_VAR = "HPCEVAL_API_TOKEN"

_RETRY_ATTEMPTS = 3
_BACKOFF_START_S = 1.0


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    n: int = 1
    max_new_tokens: int = DEFAULT_MAX_NEW_TOKENS
    temperature: float = DEFAULT_TEMPERATURE
    top_p: float = DEFAULT_TOP_P
    stop: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be ≥ 1, got {self.n}")
        if not (self.temperature > 0):
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not (0 < self.top_p <= 1):
            raise ValueError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be ≥ 1")


def request_digest(prompt: str, index: int) -> str:
    """Stable hash binding a completion to its (prompt, sample index) pair."""
    h = hashlib.sha256()
    h.update(prompt.encode("utf-8"))
    h.update(b"\x00")
    h.update(str(index).encode("ascii"))
    return h.hexdigest()


@dataclass(frozen=True)
class Completion:
    text: str
    provider_id: str
    request_digest: str
    index: int


@dataclass(frozen=True)
class CompletionError:
    message: str
    provider_id: str
    index: int


CompletionResult = Completion | CompletionError


class Provider(Protocol):
    """A backend that returns exactly req.n results for a request."""

    provider_id: str

    def complete(
        self, req: CompletionRequest, task_id: str
    ) -> list[CompletionResult]: ...


# ---------------------------------------------------------------------------
# oracle backend
# ---------------------------------------------------------------------------

class OracleProvider:
    """Canned completions keyed by (task_id, sample index).

    The per-task list wraps around when n exceeds its length, so a single
    reference solution can stand in for an entire batch.
    """

    provider_id = "oracle"

    def __init__(self, canned: Mapping[str, Sequence[str]]):
        self._canned = {task: tuple(texts) for task, texts in canned.items()}

    def complete(self, req: CompletionRequest, task_id: str) -> list[CompletionResult]:
        texts = self._canned.get(task_id)
        results: list[CompletionResult] = []
        for i in range(req.n):
            if not texts:
                results.append(
                    CompletionError(
                        message=f"no canned completions for task {task_id!r}",
                        provider_id=self.provider_id,
                        index=i,
                    )
                )
                continue
            results.append(
                Completion(
                    text=texts[i % len(texts)],
                    provider_id=self.provider_id,
                    request_digest=request_digest(req.prompt, i),
                    index=i,
                )
            )
        return results


# ---------------------------------------------------------------------------
# file replay backend
# ---------------------------------------------------------------------------

class FileProvider:
    """Replays completions stored as ``<root>/<task-id>/<NNN>.txt``."""

    provider_id = "file"

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def complete(self, req: CompletionRequest, task_id: str) -> list[CompletionResult]:
        task_dir = self.root / task_id
        results: list[CompletionResult] = []
        for i in range(req.n):
            path = task_dir / f"{i:03d}.txt"
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                results.append(
                    CompletionError(
                        message=f"missing sample file {path}: {exc}",
                        provider_id=self.provider_id,
                        index=i,
                    )
                )
                continue
            results.append(
                Completion(
                    text=text,
                    provider_id=self.provider_id,
                    request_digest=request_digest(req.prompt, i),
                    index=i,
                )
            )
        return results


def write_replay_dir(root: str | Path, task_id: str, texts: Sequence[str]) -> None:
    """Lay out texts in the directory shape FileProvider reads back."""
    task_dir = Path(root) / task_id
    task_dir.mkdir(parents=True, exist_ok=True)
    for i, text in enumerate(texts):
        (task_dir / f"{i:03d}.txt").write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# HTTP backend
# ---------------------------------------------------------------------------

class HttpProvider:
    """POSTs one JSON batch request per call and maps the reply to results.

    Request body: {"prompt", "n", "max_new_tokens", "temperature", "top_p",
    "stop"}; expected reply: {"completions": [{"text": ...}, ...]}.
    Transient failures retry with exponential backoff before an entire
    batch is converted to error records.
    """

    provider_id = "http"

    def __init__(
        self,
        endpoint: str | None = None,
        auth_token: str | None = None,
        timeout_s: float = 120.0,
        retries: int = _RETRY_ATTEMPTS,
        backoff_s: float = _BACKOFF_START_S,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV_VAR)
        if not self.endpoint:
            raise ValueError(
                f"no endpoint given and {ENDPOINT_ENV_VAR} is not set"
            )
        self.auth_token = auth_token or os.environ.get(TOKEN_ENV_VAR)
        self.timeout_s = timeout_s
        self.retries = retries
        self.backoff_s = backoff_s
        self._session = session or requests.Session()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        return headers

    def complete(self, req: CompletionRequest, task_id: str) -> list[CompletionResult]:
        payload = {
            "prompt": req.prompt,
            "n": req.n,
            "max_new_tokens": req.max_new_tokens,
            "temperature": req.temperature,
            "top_p": req.top_p,
            "stop": list(req.stop),
        }
        last_error = "unknown error"
        delay = self.backoff_s
        for attempt in range(1, self.retries + 1):
            try:
                resp = self._session.post(
                    self.endpoint,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.timeout_s,
                )
                resp.raise_for_status()
                body = resp.json()
                texts = [c["text"] for c in body["completions"]]
                if len(texts) != req.n:
                    raise ValueError(
                        f"server returned {len(texts)} completions, expected {req.n}"
                    )
                return [
                    Completion(
                        text=t,
                        provider_id=self.provider_id,
                        request_digest=request_digest(req.prompt, i),
                        index=i,
                    )
                    for i, t in enumerate(texts)
                ]
            except (requests.RequestException, ValueError, KeyError) as exc:
                last_error = f"attempt {attempt}/{self.retries}: {exc}"
                logger.warning("http provider %s (%s)", last_error, task_id)
                if attempt < self.retries:
                    time.sleep(delay)
                    delay *= 2
        return [
            CompletionError(
                message=last_error, provider_id=self.provider_id, index=i
            )
            for i in range(req.n)
        ]


# ---------------------------------------------------------------------------
# completion post-processing
# ---------------------------------------------------------------------------

_LINE_COMMENT = "line_comment"
_BLOCK_COMMENT = "block_comment"
_STRING = "string"
_CHAR = "char"
_CODE = "code"


def open_brace_depth(prompt: str) -> int:
    """Number of ``{`` left unmatched at the end of the prompt."""
    depth = 0
    for ch, state in _lex(prompt):
        if state != _CODE:
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth = max(0, depth - 1)
    return depth


def _lex(text: str):
    """Yield (char, state) with comments and literals classified.

    Minimal C/C++ lexing: // and /* */ comments, ``"`` and ``'`` literals
    with backslash escapes.  Good enough to keep braces inside them from
    counting.
    """
    state = _CODE
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if state == _CODE:
            if ch == "/" and i + 1 < n and text[i + 1] == "/":
                yield ch, _LINE_COMMENT
                state = _LINE_COMMENT
            elif ch == "/" and i + 1 < n and text[i + 1] == "*":
                yield ch, _BLOCK_COMMENT
                state = _BLOCK_COMMENT
                # consume the '*' so "/*/" does not self-close
                i += 1
                yield "*", _BLOCK_COMMENT
            elif ch == '"':
                yield ch, _STRING
                state = _STRING
            elif ch == "'":
                yield ch, _CHAR
                state = _CHAR
            else:
                yield ch, _CODE
        elif state == _LINE_COMMENT:
            yield ch, _LINE_COMMENT
            if ch == "\n":
                state = _CODE
        elif state == _BLOCK_COMMENT:
            if ch == "*" and i + 1 < n and text[i + 1] == "/":
                yield ch, _BLOCK_COMMENT
                i += 1
                yield "/", _BLOCK_COMMENT
                state = _CODE
            else:
                yield ch, _BLOCK_COMMENT
        elif state == _STRING:
            yield ch, _STRING
            if ch == "\\" and i + 1 < n:
                i += 1
                yield text[i], _STRING
            elif ch == '"':
                state = _CODE
        elif state == _CHAR:
            yield ch, _CHAR
            if ch == "\\" and i + 1 < n:
                i += 1
                yield text[i], _CHAR
            elif ch == "'":
                state = _CODE
        i += 1


def truncate_completion(text: str, prompt: str) -> tuple[str, bool]:
    """Cut generated text at the close of the function the prompt opened.

    Returns (truncated_text, terminated).  Brace depth starts at the
    prompt's unmatched ``{`` count; braces inside comments and literals are
    ignored.  If the depth never returns to zero the full text comes back
    flagged unterminated.
    """
    depth = open_brace_depth(prompt)
    if depth == 0:
        return text, True
    out: list[str] = []
    for ch, state in _lex(text):
        out.append(ch)
        if state != _CODE:
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return "".join(out), True
    return text, False
