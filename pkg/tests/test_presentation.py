import pytest
from hypothesis import given, strategies as st

from hypcayley.errors import PresentationError
from hypcayley.presentation import FIXTURES, load_presentation, parse_presentation


def test_fixtures_load():
    ranks = {name: load_presentation(name).rank for name in FIXTURES}
    assert ranks == {"free2": 2, "z2": 2, "surface2": 4}
    assert load_presentation("z2.grp").relators == ((1, 2, -1, -2),)
    assert load_presentation("free2").relators == ()


@pytest.mark.parametrize(
    "text",
    [
        "generators: a a\n",
        "generators: a\nrelator: b\n",
        "generators: a\nrelator: a A\n",
        "relator: a\n",
        "generators: A\n",
        "generators: a\nfoo: x\n",
        "",
    ],
)
def test_malformed_inputs_raise(text):
    with pytest.raises(PresentationError):
        parse_presentation(text)


def test_presentation_error_is_value_error():
    assert issubclass(PresentationError, ValueError)


def test_comments_and_blank_lines():
    p = parse_presentation("# c\n\ngenerators: a b\n  # indented\nrelator: a b A B\n")
    assert p.relators == ((1, 2, -1, -2),)
    with pytest.raises(PresentationError):
        parse_presentation("generators: a b\nrelator: a b # tail\n")


@given(st.sampled_from(FIXTURES))
def test_text_roundtrip(name):
    p = load_presentation(name)
    assert parse_presentation(p.to_text()) == p


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_presentation(str(tmp_path / "nope.grp"))
