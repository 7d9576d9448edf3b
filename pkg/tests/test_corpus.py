import hashlib
import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hpceval import corpus


# --- line counting ---------------------------------------------------------


def test_count_loc_cases():
    assert corpus.count_loc(b"") == 0
    assert corpus.count_loc(b"one line\n") == 1
    assert corpus.count_loc(b"no trailing newline") == 1
    assert corpus.count_loc(b"a\nb\nc\n") == 3
    assert corpus.count_loc(b"a\nb") == 2
    assert corpus.count_loc(b"\n") == 1
    assert corpus.count_loc(b"\n\n") == 2


@given(st.binary(max_size=500))
def test_count_loc_matches_splitlines_oracle(data):
    # independent formulation: number of \n-delimited segments with content
    # position, i.e. bytes split at newlines, ignoring a trailing empty piece
    pieces = data.split(b"\n")
    if pieces and pieces[-1] == b"":
        pieces.pop()
    assert corpus.count_loc(data) == len(pieces)


# --- ingest ----------------------------------------------------------------


def _plant(root, rel, content):
    path = root / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(content, str):
        content = content.encode()
    path.write_bytes(content)
    return path


def test_ingest_walks_and_describes(tmp_path):
    _plant(tmp_path, "a/x.cpp", "int main() { return 0; }\n")
    _plant(tmp_path, "a/y.h", "#pragma once\nint decl(int, int);\n")
    _plant(tmp_path, "b/z.txt", "not source\n")
    index = corpus.ingest([tmp_path])
    assert [f.extension for f in index.files] == ["cpp", "h"]
    f = index.files[0]
    assert f.loc == 1 and f.bytes == 25
    assert f.content_hash == hashlib.sha256(b"int main() { return 0; }\n").hexdigest()


def test_ingest_order_is_lexicographic(tmp_path):
    for name in ("zz.cpp", "aa.cpp", "mm/nn.cpp"):
        _plant(tmp_path, name, f"// {name}\nint v;\n")
    index = corpus.ingest([tmp_path], max_workers=4)
    paths = [f.path for f in index.files]
    assert paths == sorted(paths)


def test_ingest_skips_symlinks(tmp_path):
    target = _plant(tmp_path, "real.cpp", "int real;\n")
    os.symlink(target, tmp_path / "link.cpp")
    index = corpus.ingest([tmp_path])
    assert [os.path.basename(f.path) for f in index.files] == ["real.cpp"]


def test_ingest_extension_case_sensitivity(tmp_path):
    _plant(tmp_path, "upper.H", "int a;\n")  # listed
    _plant(tmp_path, "upper.CPP", "int b;\n")  # not listed
    index = corpus.ingest([tmp_path])
    assert [f.extension for f in index.files] == ["H"]


def test_ingest_missing_root_is_fatal(tmp_path):
    with pytest.raises(FileNotFoundError):
        corpus.ingest([tmp_path / "nope"])


# --- dedup and filter ------------------------------------------------------


def _make_index(tmp_path, specs):
    for rel, content in specs:
        _plant(tmp_path, rel, content)
    return corpus.ingest([tmp_path])


def test_dedup_keeps_first_in_order(tmp_path):
    index = _make_index(
        tmp_path,
        [("a.cpp", "same body\n"), ("b.cpp", "same body\n"), ("c.cpp", "other\n")],
    )
    deduped = corpus.dedup(index)
    assert [os.path.basename(f.path) for f in deduped.files] == ["a.cpp", "c.cpp"]
    assert "dedup" in deduped.provenance


def test_filter_boundaries(tmp_path):
    header = b"a b c d e f g h i j k l m n o p\n"  # 16 tokens, keeps the floor happy
    exactly_1mib = header + b"x" * ((1 << 20) - len(header))
    assert len(exactly_1mib) == 1 << 20
    over_1mib = exactly_1mib + b"y"
    fifteen_tokens = " ".join(f"t{i}" for i in range(15)) + "\n"
    fourteen_tokens = " ".join(f"t{i}" for i in range(14)) + "\n"
    index = _make_index(
        tmp_path,
        [
            ("at_limit.cpp", exactly_1mib),
            ("over.cpp", over_1mib),
            ("enough.cpp", fifteen_tokens),
            ("sparse.cpp", fourteen_tokens),
        ],
    )
    kept = corpus.filter_size(index)
    names = {os.path.basename(f.path) for f in kept.files}
    assert names == {"at_limit.cpp", "enough.cpp"}


def test_filter_is_idempotent(tmp_path):
    index = _make_index(
        tmp_path, [("a.cpp", "int a;\n"), ("b.cpp", " ".join("w" for _ in range(20)))]
    )
    once = corpus.filter_size(index)
    twice = corpus.filter_size(once)
    assert once.files == twice.files


# --- stats -----------------------------------------------------------------


def test_stats_totals(tmp_path):
    index = _make_index(
        tmp_path,
        [
            ("one.cpp", "a\nb\nc\n"),
            ("two.cpp", "d\ne\n"),
            ("three.h", "f\n"),
        ],
    )
    st_ = corpus.stats(index)
    assert st_.files_by_extension == {"cpp": 2, "h": 1}
    assert st_.loc_by_extension == {"cpp": 5, "h": 1}
    assert st_.total_files == 3
    assert st_.total_loc == 6
    assert st_.total_bytes == sum(f.bytes for f in index.files)


# --- serialization ---------------------------------------------------------


def test_index_round_trip(tmp_path):
    index = _make_index(
        tmp_path, [("a.cpp", "int a;\n"), ("b.h", "int b;\n"), ("c.cc", "int c;\n")]
    )
    out = tmp_path / "index.jsonl"
    corpus.write_index(index, out)
    back = corpus.read_index(out)
    assert back.files == index.files


def test_export_refuses_empty_index(tmp_path):
    empty = corpus.CorpusIndex(files=(), provenance=("ingest",))
    with pytest.raises(ValueError):
        corpus.export_training(empty, tmp_path / "out.txt", fmt="jsonl")


def test_export_plain_concat_uses_separator(tmp_path):
    index = _make_index(tmp_path, [("a.cpp", "AAA"), ("b.cpp", "BBB")])
    out = tmp_path / "train.txt"
    corpus.export_training(index, out, fmt="plain-concat", separator="\n==\n")
    assert out.read_text() == "AAA\n==\nBBB"


def test_export_jsonl_has_path_and_content(tmp_path):
    import json

    index = _make_index(tmp_path, [("a.cpp", "AAA\n")])
    out = tmp_path / "train.jsonl"
    corpus.export_training(index, out, fmt="jsonl")
    row = json.loads(out.read_text().splitlines()[0])
    assert row["content"] == "AAA\n"
    assert row["path"].endswith("a.cpp")


# --- dataclass validation ---------------------------------------------------


def test_source_file_rejects_unknown_extension():
    with pytest.raises(ValueError):
        corpus.SourceFile(
            path="x.rs", extension="rs", bytes=1, loc=1, token_count=1,
            content_hash="0" * 64,
        )


def test_source_file_rejects_negative_counts():
    with pytest.raises(ValueError):
        corpus.SourceFile(
            path="x.cpp", extension="cpp", bytes=-1, loc=1, token_count=1,
            content_hash="0" * 64,
        )
