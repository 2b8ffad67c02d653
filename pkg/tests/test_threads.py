from __future__ import annotations

import random

import pytest

from hypothesis import given, settings, strategies as st

from crossbound.threads import DAY, build_discussions, discussion_index_record, discussion_interval

from conftest import T0, discussion, msg


def _ids(discussions):
    return [sorted(d.message_ids) for d in discussions]


def test_header_chain_is_one_discussion():
    a = msg("A", "x", 0, subject="decimal")
    b = msg("B", "y", 1, subject="Re: decimal", parent="A")
    c = msg("C", "x", 2, subject="Re: decimal", parent="B", refs=("A", "B"))
    (d,) = build_discussions({"A", "B", "C"}, [a, b, c])
    assert d.message_ids == ("A", "B", "C")
    assert d.discussion_id == "py-list/A"
    assert d.subject_key == "decimal"
    assert set(d.reply_edges) == {("B", "A"), ("C", "B")}


def test_subject_fallback_joins_headerless_messages():
    a = msg("A", "x", 0, subject="Decimal rounding")
    b = msg("B", "y", 3, subject="Re: decimal rounding")
    (d,) = build_discussions({"A", "B"}, [a, b])
    assert len(d) == 2


def test_subject_fallback_respects_window():
    a = msg("A", "x", 0, subject="decimal rounding")
    b = msg("B", "y", 30, subject="Re: decimal rounding")
    assert len(build_discussions({"A", "B"}, [a, b])) == 2
    assert len(build_discussions({"A", "B"}, [a, b], fallback_days=40)) == 1


def test_empty_subject_never_falls_back():
    a = msg("A", "x", 0, subject="")
    b = msg("B", "y", 1, subject="Re:")
    assert len(build_discussions({"A", "B"}, [a, b])) == 2


def test_fallback_stays_within_a_list():
    a = msg("A", "x", 0, subject="decimal", list_id="py-list")
    b = msg("B", "y", 1, subject="Re: decimal", list_id="py-dev")
    out = build_discussions({"A", "B"}, [a, b])
    assert sorted(d.list_id for d in out) == ["py-dev", "py-list"]


def test_last_resolvable_reference_is_parent():
    a = msg("A", "x", 0)
    b = msg("B", "y", 1, parent="A")
    c = msg("C", "z", 2, subject="other", parent=None, refs=("A", "B", "gone@x"))
    (d,) = build_discussions({"A", "B", "C"}, [a, b, c])
    assert ("C", "B") in d.reply_edges


def test_reply_cycle_is_broken_with_diagnostic():
    a = msg("A", "x", 0, subject="s1", parent="B")
    b = msg("B", "y", 0, subject="s2", parent="A")
    diags: list = []
    out = build_discussions({"A", "B"}, [a, b], diagnostics=diags)
    assert len(out) == 1 and len(out[0]) == 2
    assert any("cycle" in d.reason for d in diags)


def test_parent_after_child_is_ignored():
    a = msg("A", "x", 0, subject="s1", parent="B")
    b = msg("B", "y", 5, subject="s2")
    diags: list = []
    out = build_discussions({"A", "B"}, [a, b], diagnostics=diags)
    assert len(out) == 2
    assert diags and diags[0].message_id == "A"


def test_unknown_selected_id_raises():
    with pytest.raises(ValueError):
        build_discussions({"nope"}, [])


def test_list_fixture_totals():
    """22 user-list and 29 developer-list threads with distinct subjects."""
    messages = []
    for lid, n in (("py-list", 22), ("py-dev", 29)):
        for i in range(n):
            root = msg(f"{lid}.{i}", "a", i, list_id=lid, subject=f"decimal topic {i}")
            reply = msg(f"{lid}.{i}r", "b", i + 0.5, list_id=lid, subject=f"Re: decimal topic {i}",
                        parent=f"{lid}.{i}")
            messages += [root, reply]
    out = build_discussions({m.message_id for m in messages}, messages)
    assert sum(d.list_id == "py-list" for d in out) == 22
    assert sum(d.list_id == "py-dev" for d in out) == 29


def test_interval_examples():
    single = discussion("s", [msg("s", "x", 3)])
    assert discussion_interval(single) == (single.start, single.start)
    trio = [msg("a", "x", 0), msg("b", "x", 4), msg("c", "x", 9)]
    d = discussion("t", trio)
    assert discussion_interval(d) == (T0, T0 + 9 * DAY)
    rnd = random.Random(5)
    shuffled = trio[:]
    rnd.shuffle(shuffled)
    d2 = d.__class__(d.discussion_id, d.list_id, d.subject_key, tuple(shuffled))
    assert discussion_interval(d2) == discussion_interval(d)


def test_index_record():
    d = discussion("t", [msg("a", "x", 0), msg("b", "y", 1)])
    rec = discussion_index_record(d)
    assert rec["n_messages"] == 2 and rec["participants"] == ["x", "y"]


@st.composite
def _forests(draw):
    n = draw(st.integers(1, 25))
    msgs = []
    for i in range(n):
        parent = draw(st.one_of(st.none(), st.integers(0, i - 1))) if i else None
        subject = draw(st.sampled_from(["decimal", "Re: decimal", "money", "", "Re: money"]))
        day = draw(st.integers(0, 60))
        msgs.append(msg(f"m{i}", f"p{i % 4}", day, subject=subject,
                        parent=f"m{parent}" if parent is not None else None,
                        list_id=draw(st.sampled_from(["py-list", "py-dev"]))))
    return msgs


@settings(max_examples=150, deadline=None)
@given(_forests())
def test_discussions_partition_the_selection(messages):
    ids = {m.message_id for m in messages}
    out = build_discussions(ids, messages)
    seen = [i for d in out for i in d.message_ids]
    assert sorted(seen) == sorted(ids)
    for d in out:
        assert {m.list_id for m in d.messages} == {d.list_id}
        assert discussion_interval(d) == (d.start, d.end)


@settings(max_examples=60, deadline=None)
@given(_forests(), st.randoms(use_true_random=False))
def test_discussions_do_not_depend_on_input_order(messages, rnd):
    ids = {m.message_id for m in messages}
    shuffled = messages[:]
    rnd.shuffle(shuffled)
    assert _ids(build_discussions(ids, messages)) == _ids(build_discussions(ids, shuffled))
