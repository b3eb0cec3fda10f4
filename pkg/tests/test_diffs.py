from hypothesis import given, settings
from hypothesis import strategies as st

from choir.diffs import apply_diff, diff_documents


def test_identity_has_no_changes():
    diff = diff_documents("a\nb\n", "a\nb\n")
    assert diff.inserted == 0 and diff.deleted == 0
    assert all(h.op == "keep" for h in diff.hunks)
    assert apply_diff("a\nb\n", diff) == "a\nb\n"


def test_single_insert():
    diff = diff_documents("a\nb\n", "a\nc\nb\n")
    inserts = [h for h in diff.hunks if h.op == "insert"]
    assert len(inserts) == 1 and inserts[0].lines == ("c\n",)
    assert diff.deleted == 0
    assert apply_diff("a\nb\n", diff) == "a\nc\nb\n"


def test_pure_deletion():
    diff = diff_documents("a\nb\nc\n", "a\nc\n")
    assert diff.inserted == 0 and diff.deleted == 1
    assert apply_diff("a\nb\nc\n", diff) == "a\nc\n"


def test_missing_trailing_newline_preserved():
    base = "a\nb"
    new = "a\nb\nc"
    assert apply_diff(base, diff_documents(base, new)) == new


_lines = st.lists(st.sampled_from(["a", "b", "c", "dd", ""]), max_size=12)
_text = _lines.map(lambda ls: "".join(l + "\n" for l in ls))


@given(_text, _text, st.booleans())
@settings(max_examples=300, deadline=None)
def test_reapplication_property(base, new, strip):
    if strip and new.endswith("\n"):
        new = new[:-1]
    diff = diff_documents(base, new)
    assert apply_diff(base, diff) == new


@given(st.text(max_size=200), st.text(max_size=200))
@settings(max_examples=200, deadline=None)
def test_reapplication_arbitrary_text(base, new):
    assert apply_diff(base, diff_documents(base, new)) == new
