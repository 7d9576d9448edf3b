"""Local C/C++ corpus curation: ingest, dedup, size filter, stats, export.

The pipeline starts from already-cloned source trees on disk.  Each stage
returns a new index and appends its name to the provenance trail, so a
pipeline like ``filter_size(dedup(ingest(...)))`` is an ordinary function
composition with inspectable history.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .tokenizer import DEFAULT_TOKENIZER, Tokenizer

logger = logging.getLogger(__name__)

# Case-sensitive: "H" is a C++ header convention, "h" plain C.
CPP_EXTENSIONS = frozenset({"c", "h", "cpp", "hpp", "cc", "cxx", "hh", "H", "hxx"})

MAX_FILE_BYTES = 1 << 20
MIN_FILE_TOKENS = 15


@dataclass(frozen=True)
class SourceFile:
    """One ingested source file plus the metadata the filters key on."""

    path: str
    extension: str
    bytes: int
    loc: int
    token_count: int
    content_hash: str

    def __post_init__(self) -> None:
        if self.bytes < 0 or self.loc < 0:
            raise ValueError(f"negative size fields for {self.path}")
        if self.extension not in CPP_EXTENSIONS:
            raise ValueError(f"extension {self.extension!r} not in allowed set")


@dataclass(frozen=True)
class CorpusIndex:
    files: tuple[SourceFile, ...]
    provenance: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.files)


@dataclass(frozen=True)
class CorpusStats:
    files_by_extension: dict[str, int]
    loc_by_extension: dict[str, int]
    total_bytes: int
    total_files: int

    @property
    def total_loc(self) -> int:
        return sum(self.loc_by_extension.values())


def count_loc(data: bytes) -> int:
    """Newline-delimited line count of raw bytes.

    A trailing newline does not open an extra line; a non-empty file
    without one still counts its final line.
    """
    if not data:
        return 0
    n = data.count(b"\n")
    if not data.endswith(b"\n"):
        n += 1
    return n


def _file_extension(path: Path) -> str | None:
    suffix = path.suffix
    if not suffix.startswith("."):
        return None
    ext = suffix[1:]
    return ext if ext in CPP_EXTENSIONS else None


def _describe(path: Path, ext: str, tokenizer: Tokenizer) -> SourceFile:
    data = path.read_bytes()
    text = data.decode("utf-8", errors="replace")
    return SourceFile(
        path=str(path),
        extension=ext,
        bytes=len(data),
        loc=count_loc(data),
        token_count=tokenizer.count(text),
        content_hash=hashlib.sha256(data).hexdigest(),
    )


def ingest(
    roots: Iterable[str | Path],
    extensions: frozenset[str] = CPP_EXTENSIONS,
    tokenizer: Tokenizer = DEFAULT_TOKENIZER,
    max_workers: int = 8,
) -> CorpusIndex:
    """Walk source trees and describe every matching file.

    Unreadable roots are hard errors; unreadable individual files are
    logged and skipped.  Symlinks are not followed.  Output order is
    lexicographic by path regardless of worker scheduling.
    """
    candidates: list[tuple[Path, str]] = []
    for root in roots:
        root = Path(root)
        if not root.is_dir():
            raise FileNotFoundError(f"corpus root not readable: {root}")
        for dirpath, dirnames, filenames in os.walk(root, followlinks=False):
            dirnames.sort()
            for name in sorted(filenames):
                path = Path(dirpath) / name
                if path.is_symlink():
                    continue
                ext = _file_extension(path)
                if ext is not None and path.is_file():
                    candidates.append((path, ext))
    candidates.sort(key=lambda pair: str(pair[0]))

    def worker(pair: tuple[Path, str]) -> SourceFile | None:
        path, ext = pair
        try:
            return _describe(path, ext, tokenizer)
        except OSError as exc:
            logger.warning("skipping unreadable file %s: %s", path, exc)
            return None

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        described = list(pool.map(worker, candidates))

    files = tuple(f for f in described if f is not None)
    return CorpusIndex(files=files, provenance=("ingest",))


def dedup(index: CorpusIndex) -> CorpusIndex:
    """Keep the first file in index order for each distinct content hash."""
    seen: set[str] = set()
    kept: list[SourceFile] = []
    for f in index.files:
        if f.content_hash in seen:
            continue
        seen.add(f.content_hash)
        kept.append(f)
    return CorpusIndex(files=tuple(kept), provenance=index.provenance + ("dedup",))


def filter_size(
    index: CorpusIndex,
    max_bytes: int = MAX_FILE_BYTES,
    min_tokens: int = MIN_FILE_TOKENS,
) -> CorpusIndex:
    """Drop files strictly larger than max_bytes or with fewer than min_tokens."""
    kept = tuple(
        f for f in index.files if f.bytes <= max_bytes and f.token_count >= min_tokens
    )
    return CorpusIndex(files=kept, provenance=index.provenance + ("filter_size",))


def stats(index: CorpusIndex) -> CorpusStats:
    files_by_ext: dict[str, int] = {}
    loc_by_ext: dict[str, int] = {}
    total_bytes = 0
    for f in index.files:
        files_by_ext[f.extension] = files_by_ext.get(f.extension, 0) + 1
        loc_by_ext[f.extension] = loc_by_ext.get(f.extension, 0) + f.loc
        total_bytes += f.bytes
    return CorpusStats(
        files_by_extension=files_by_ext,
        loc_by_extension=loc_by_ext,
        total_bytes=total_bytes,
        total_files=len(index.files),
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def write_index(index: CorpusIndex, out_path: str | Path) -> None:
    """One JSON record per file: path, ext, bytes, loc, tokens, sha256."""
    with open(out_path, "w", encoding="utf-8") as fh:
        for f in index.files:
            fh.write(
                json.dumps(
                    {
                        "path": f.path,
                        "ext": f.extension,
                        "bytes": f.bytes,
                        "loc": f.loc,
                        "tokens": f.token_count,
                        "sha256": f.content_hash,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_index(in_path: str | Path) -> CorpusIndex:
    files: list[SourceFile] = []
    with open(in_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            files.append(
                SourceFile(
                    path=rec["path"],
                    extension=rec["ext"],
                    bytes=rec["bytes"],
                    loc=rec["loc"],
                    token_count=rec["tokens"],
                    content_hash=rec["sha256"],
                )
            )
    return CorpusIndex(files=tuple(files))


def export_training(
    index: CorpusIndex,
    out_path: str | Path,
    fmt: str = "jsonl",
    separator: str = "\n\n",
) -> None:
    """Write file contents for training consumption.

    plain-concat joins contents with ``separator``; jsonl writes one
    {"path", "content"} record per file.  Both re-read from disk, so the
    files must still exist at their indexed paths.
    """
    if not index.files:
        raise ValueError("refusing to export an empty index")
    if fmt not in {"plain", "plain-concat", "jsonl"}:
        raise ValueError(f"unknown export format {fmt!r}")
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "jsonl":
            for f in index.files:
                content = Path(f.path).read_bytes().decode("utf-8", errors="replace")
                fh.write(json.dumps({"path": f.path, "content": content}) + "\n")
        else:
            parts = []
            for f in index.files:
                parts.append(Path(f.path).read_bytes().decode("utf-8", errors="replace"))
            fh.write(separator.join(parts))
