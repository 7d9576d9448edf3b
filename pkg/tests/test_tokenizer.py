from hypothesis import given
from hypothesis import strategies as st

from hpceval.tokenizer import DEFAULT_TOKENIZER, SimpleTokenizer

tok = SimpleTokenizer()


def test_count_simple_statement():
    # int, x, =, 42, ;
    assert tok.count("int x = 42;") == 5


def test_count_empty():
    assert tok.count("") == 0
    assert tok.count("   \n\t ") == 0


def test_operators_split_per_char():
    assert tok.tokenize("a+=b") == ["a", "+", "=", "b"]


def test_numeric_literals_stay_whole():
    assert tok.tokenize("0x1F 3.14 1e-5 42") == ["0x1F", "3.14", "1e-5", "42"]


def test_spans_cover_tokens_in_order():
    text = "for (int i = 0; i < n; i++)"
    spans = tok.spans(text)
    assert [text[a:b] for a, b in spans] == tok.tokenize(text)
    assert spans == sorted(spans)


def test_tail_keeps_last_tokens():
    text = "alpha beta gamma delta"
    assert tok.tail(text, 2) == "gamma delta"
    assert tok.tail(text, 100) == text
    assert tok.tail(text, 0) == ""


def test_tail_cuts_at_token_boundary():
    text = "first_token second_token"
    out = tok.tail(text, 1)
    assert out == "second_token"


@given(st.text(max_size=300), st.integers(min_value=1, max_value=50))
def test_tail_is_suffix_within_budget(text, budget):
    out = tok.tail(text, budget)
    assert text.endswith(out)
    assert tok.count(out) <= budget


@given(st.text(max_size=300))
def test_count_matches_spans(text):
    assert tok.count(text) == len(tok.spans(text))


def test_default_instance_is_shared():
    assert DEFAULT_TOKENIZER.count("a b") == 2
