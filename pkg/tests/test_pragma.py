import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hpceval import pragma
from hpceval.corpus import ingest
from hpceval.pragma import (
    BEGIN_OMP,
    LoopSample,
    PragmaParseError,
    evaluate_prediction,
    evaluate_predictions,
    exact_match,
    extract_from_text,
    extract_loops,
    format_sample,
    functionally_equivalent,
    parse_pragma,
    read_dataset,
    render_pragma,
    score,
    write_dataset,
    write_training_text,
)

P = "#pragma omp parallel for"


# --- grammar -----------------------------------------------------------------


def test_parse_bare_directive():
    ast = parse_pragma(P)
    assert ast.clauses == frozenset()
    assert ast.directive == "parallel for"


def test_parse_rejects_non_parallel_for():
    for bad in ("#pragma omp parallel", "#pragma omp simd", "#pragma once", "for (;;)"):
        with pytest.raises(PragmaParseError):
            parse_pragma(bad)
    # "parallel forx" must not match by prefix
    with pytest.raises(PragmaParseError):
        parse_pragma("#pragma omp parallel forx")


def test_parse_var_list_clause():
    ast = parse_pragma(f"{P} private(i, j)")
    assert ast.clauses == frozenset({("private", frozenset({"i", "j"}))})


def test_repeated_var_list_clauses_merge():
    a = parse_pragma(f"{P} private(i) private(j)")
    b = parse_pragma(f"{P} private(j, i)")
    assert a == b


def test_reduction_merges_per_operator():
    a = parse_pragma(f"{P} reduction(+:x) reduction(+:y) reduction(max:m)")
    b = parse_pragma(f"{P} reduction(+:y,x) reduction(max:m)")
    assert a == b
    ops = {payload[0] for name, payload in a.clauses if name == "reduction"}
    assert ops == {"+", "max"}


def test_reduction_requires_op_and_list():
    with pytest.raises(PragmaParseError):
        parse_pragma(f"{P} reduction(x)")
    with pytest.raises(PragmaParseError):
        parse_pragma(f"{P} reduction(:x)")
    with pytest.raises(PragmaParseError):
        parse_pragma(f"{P} reduction")


def test_literal_clauses_keep_stripped_payload():
    ast = parse_pragma(f"{P} collapse( 2 ) num_threads(8) schedule(static, 4)")
    assert ("collapse", "2") in ast.clauses
    assert ("num_threads", "8") in ast.clauses
    assert ("schedule", "static,4") in ast.clauses


def test_bare_clauses():
    ast = parse_pragma(f"{P} nowait ordered")
    assert ("nowait", None) in ast.clauses
    assert ("ordered", None) in ast.clauses


def test_unknown_clause_is_kept_opaque():
    ast = parse_pragma(f"{P} frobnicate(a + b)")
    assert ("frobnicate", "a+b") in ast.clauses


def test_clause_commas_between_clauses_allowed():
    a = parse_pragma(f"{P} private(i), shared(x)")
    b = parse_pragma(f"{P} private(i) shared(x)")
    assert a == b


def test_nested_parens_stay_in_one_payload():
    ast = parse_pragma(f"{P} if(f(a, b) > 0)")
    assert ("if", "f(a,b)>0") in ast.clauses


def test_var_list_requires_payload():
    with pytest.raises(PragmaParseError):
        parse_pragma(f"{P} private")


def test_unbalanced_parens_rejected():
    with pytest.raises(PragmaParseError):
        parse_pragma(f"{P} private(i")
    with pytest.raises(PragmaParseError):
        parse_pragma(f"{P} schedule(static))")


def test_whitespace_insensitivity():
    a = parse_pragma("#pragma   omp\tparallel  for   private( i , j )")
    b = parse_pragma(f"{P} private(i,j)")
    assert a == b


def test_parse_error_carries_position():
    try:
        parse_pragma(f"{P} private(")
    except PragmaParseError as exc:
        assert isinstance(exc.position, int) and exc.position > 0
    else:
        pytest.fail("expected a parse error")


# --- render / parse fixed point -----------------------------------------------


clause_pool = st.lists(
    st.sampled_from(
        [
            "private(i)",
            "private(j, k)",
            "firstprivate(a)",
            "lastprivate(z)",
            "shared(buf, n)",
            "reduction(+:total)",
            "reduction(max:hi)",
            "reduction(*:prod, scale)",
            "collapse(2)",
            "num_threads(4)",
            "schedule(static)",
            "schedule(dynamic, 16)",
            "default(none)",
            "if(n > 100)",
            "nowait",
            "ordered",
        ]
    ),
    max_size=6,
)


@given(clause_pool)
def test_render_parse_fixed_point(clauses):
    text = " ".join([P] + clauses)
    ast = parse_pragma(text)
    rendered = render_pragma(ast)
    assert parse_pragma(rendered) == ast
    # rendering is deterministic, so round-tripping twice is stable
    assert render_pragma(parse_pragma(rendered)) == rendered


@given(clause_pool, st.randoms())
def test_clause_order_never_matters(clauses, rnd):
    shuffled = clauses[:]
    rnd.shuffle(shuffled)
    a = parse_pragma(" ".join([P] + clauses))
    b = parse_pragma(" ".join([P] + shuffled))
    assert a == b
    assert functionally_equivalent(a, b)


# --- equivalence and scoring ---------------------------------------------------


def test_schedule_is_ignorable_by_default():
    a = parse_pragma(f"{P} schedule(static) private(i)")
    b = parse_pragma(f"{P} schedule(dynamic, 64) private(i)")
    c = parse_pragma(f"{P} private(i)")
    assert functionally_equivalent(a, b)
    assert functionally_equivalent(a, c)


def test_ignorable_set_is_configurable():
    a = parse_pragma(f"{P} num_threads(2)")
    b = parse_pragma(f"{P} num_threads(16)")
    assert not functionally_equivalent(a, b)
    assert functionally_equivalent(a, b, ignorable=frozenset({"num_threads"}))
    # and schedule stops being ignorable when excluded
    s1 = parse_pragma(f"{P} schedule(static)")
    s2 = parse_pragma(f"{P} schedule(guided)")
    assert not functionally_equivalent(s1, s2, ignorable=frozenset())


def test_missing_reduction_is_not_equivalent():
    a = parse_pragma(f"{P} reduction(+:sum)")
    b = parse_pragma(P)
    assert not functionally_equivalent(a, b)


def test_equivalence_relation_properties():
    texts = [
        f"{P} private(i) reduction(+:s)",
        f"{P} reduction(+:s) private(i)",
        f"{P} private(i) reduction(+:s) schedule(static)",
    ]
    asts = [parse_pragma(t) for t in texts]
    for x in asts:
        assert functionally_equivalent(x, x)
    assert functionally_equivalent(asts[0], asts[1])
    assert functionally_equivalent(asts[1], asts[0])
    assert functionally_equivalent(asts[1], asts[2])
    assert functionally_equivalent(asts[0], asts[2])  # transitive leg


def test_exact_match_is_whitespace_normalized():
    assert exact_match(f"{P}  private(i)", f"{P} private(i)")
    assert not exact_match(f"{P} private(i)", f"{P} private( i )")


def test_exact_implies_functional_even_when_unparseable():
    pred = evaluate_prediction("s1", "#pragma omp parallel", "#pragma omp parallel")
    assert pred.exact and pred.functional


def test_unparseable_mismatch_is_wrong():
    pred = evaluate_prediction("s2", "total garbage", f"{P} private(i)")
    assert not pred.exact and not pred.functional


def test_prediction_invariant_enforced():
    with pytest.raises(ValueError):
        pragma.PragmaPrediction(
            sample_id="x", predicted_text="a", reference_text="a",
            exact=True, functional=False,
        )


def test_evaluate_predictions_counts_unparseable():
    rows = [
        {"id": "1", "predicted": f"{P} private(i)", "reference": f"{P} private(i)"},
        {"id": "2", "predicted": "nonsense", "reference": P},
        {"id": "3", "predicted": f"{P} shared(x", "reference": P},
    ]
    preds, unparseable = evaluate_predictions(rows)
    assert len(preds) == 3
    assert unparseable == 2


def test_score_modes():
    rows = [
        {"id": "1", "predicted": f"{P} private(i)", "reference": f"{P} private(i)"},
        {"id": "2", "predicted": f"{P} private(j) private(i)",
         "reference": f"{P} private(i, j)"},
        {"id": "3", "predicted": P, "reference": f"{P} reduction(+:s)"},
    ]
    preds, _ = evaluate_predictions(rows)
    assert score(preds, "exact") == pytest.approx(1 / 3)
    assert score(preds, "functional") == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        score(preds, "fuzzy")
    with pytest.raises(ValueError):
        score([], "exact")


@given(clause_pool, clause_pool)
def test_exact_implies_functional_property(ca, cb):
    pa = " ".join([P] + ca)
    pb = " ".join([P] + cb)
    pred = evaluate_prediction("x", pa, pb)
    if pred.exact:
        assert pred.functional


# --- extraction ----------------------------------------------------------------


SIMPLE = """\
#include <vector>
void scale(double *v, int n, double a) {
    #pragma omp parallel for
    for (int i = 0; i < n; i++) {
        v[i] *= a;
    }
}
"""


def test_extract_simple_loop():
    samples, skipped = extract_from_text(SIMPLE)
    assert skipped == 0
    assert len(samples) == 1
    s = samples[0]
    assert s.pragma_text == "#pragma omp parallel for"
    assert s.loop_text.startswith("for (int i")
    assert s.loop_text.rstrip().endswith("}")
    # context stops at the start of the pragma's line, indentation excluded
    assert s.context.endswith("double a) {\n")


def test_extract_ignores_other_omp_directives():
    text = "#pragma omp parallel\n{ work(); }\n#pragma omp barrier\n"
    samples, skipped = extract_from_text(text)
    assert samples == [] and skipped == 0


def test_extract_pragma_without_loop_is_skipped():
    text = "#pragma omp parallel for\nint x = 0;\n"
    samples, skipped = extract_from_text(text)
    assert samples == [] and skipped == 1


def test_extract_braceless_body():
    text = "#pragma omp parallel for\nfor (int i = 0; i < n; i++) a[i] = i;\nrest();\n"
    samples, _ = extract_from_text(text)
    assert samples[0].loop_text == "for (int i = 0; i < n; i++) a[i] = i;"


def test_extract_backslash_continuation():
    text = (
        "#pragma omp parallel for \\\n"
        "    private(i) \\\n"
        "    reduction(+:acc)\n"
        "for (i = 0; i < n; i++) acc += a[i];\n"
    )
    samples, skipped = extract_from_text(text)
    assert skipped == 0
    assert samples[0].pragma_text == "#pragma omp parallel for private(i) reduction(+:acc)"


def test_extract_hops_stacked_directives():
    text = (
        "#pragma omp parallel for\n"
        "#pragma GCC unroll 4\n"
        "for (int i = 0; i < n; i++) a[i] = 0;\n"
    )
    samples, skipped = extract_from_text(text)
    assert len(samples) == 1 and skipped == 0


def test_extract_braces_inside_strings_and_comments():
    text = (
        "#pragma omp parallel for\n"
        "for (int i = 0; i < n; i++) {\n"
        '    puts("}");\n'
        "    // }\n"
        "    a[i] = i; /* { */\n"
        "}\n"
        "void after();\n"
    )
    samples, skipped = extract_from_text(text)
    assert skipped == 0
    assert samples[0].loop_text.rstrip().endswith("}")
    assert "after" not in samples[0].loop_text


def test_extract_for_identifier_prefix_not_confused():
    text = "#pragma omp parallel for\nforward(x);\n"
    samples, skipped = extract_from_text(text)
    assert samples == [] and skipped == 1


def test_extract_multiple_loops_in_order():
    text = SIMPLE + "\n" + SIMPLE.replace("scale", "scale2")
    samples, _ = extract_from_text(text)
    assert len(samples) == 2
    assert "scale2" in samples[1].context


def test_context_respects_token_budget():
    filler = "int filler_variable_name = 0;\n" * 400
    text = filler + SIMPLE
    samples, _ = extract_from_text(text, context_tokens=500)
    from hpceval.tokenizer import DEFAULT_TOKENIZER

    assert DEFAULT_TOKENIZER.count(samples[0].context) <= 500
    # the context is a suffix of everything before the pragma's line
    line_start = text.rindex("    #pragma omp parallel for")
    assert text[:line_start].endswith(samples[0].context)
    assert len(samples[0].context) < len(text[:line_start])  # budget actually trimmed


def test_extract_loops_over_index(tmp_path):
    (tmp_path / "a.cpp").write_text(SIMPLE)
    (tmp_path / "b.cpp").write_text("#pragma omp parallel for\nbroken(\n")
    index = ingest([tmp_path])
    result = extract_loops(index)
    assert result.files_scanned == 2
    assert len(result.samples) == 1
    assert result.skipped_regions == 1


# --- formatting and serialization ----------------------------------------------


def _sample():
    return LoopSample(
        context="void f() {\n    ",
        loop_text="for (int i = 0; i < n; i++) a[i] = 0;",
        pragma_text="#pragma omp parallel for private(i)",
    )


def test_format_sample_recoverable():
    s = _sample()
    text = format_sample(s)
    head, sep, tail = text.rpartition(f" {BEGIN_OMP} ")
    assert sep
    assert tail == s.pragma_text
    assert head == s.context + s.loop_text


def test_format_sample_refuses_separator_collision():
    s = LoopSample(
        context=f"// {BEGIN_OMP}\n",
        loop_text="for (;;) ;",
        pragma_text="#pragma omp parallel for",
    )
    with pytest.raises(ValueError):
        format_sample(s)


def test_dataset_round_trip(tmp_path):
    samples = [_sample(), _sample()]
    path = tmp_path / "loops.jsonl"
    assert write_dataset(samples, path) == 2
    assert read_dataset(path) == samples


def test_training_text_layout(tmp_path):
    path = tmp_path / "train.txt"
    assert write_training_text([_sample(), _sample()], path) == 2
    content = path.read_text()
    assert content.count(BEGIN_OMP) == 2
    assert "\n\n" in content
    assert content.endswith(";\n") is False  # ends with the pragma, then newline
    assert content.endswith("\n")


def test_loop_sample_validation():
    with pytest.raises(ValueError):
        LoopSample(context="", loop_text="for (;;) ;", pragma_text="#pragma omp simd")
    with pytest.raises(ValueError):
        LoopSample(context="", loop_text="while (1) ;",
                   pragma_text="#pragma omp parallel for")
