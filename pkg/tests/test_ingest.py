import io

import pytest
from hypothesis import given, strategies as st

from echochamber.ingest import (
    Dataset, FormatError, InteractionRecord, RowError, filter_dataset,
    parse_interactions, summarize, write_interactions,
)


def test_header_only_is_empty():
    d = parse_interactions(b"user_id,page_id,post_id,action,timestamp\n")
    assert len(d) == 0


def test_three_rows(three_rows):
    d = parse_interactions(three_rows)
    assert len(d) == 3
    assert {r.user_id for r in d} == {"u1", "u2"}
    assert {r.page_id for r in d} == {"p1", "p2"}
    assert [r.timestamp for r in d] == [100, 200, 150]  # input order kept


def test_binary_and_text_streams(three_rows):
    a = parse_interactions(io.BytesIO(three_rows))
    b = parse_interactions(io.StringIO(three_rows.decode()))
    assert a == b


@pytest.mark.parametrize("header", [
    b"user_id,post_id,page_id,action,timestamp\n",
    b"user,page,post,action,time\n",
    b"",
])
def test_bad_header(header):
    with pytest.raises(FormatError):
        parse_interactions(header + b"u1,p1,x1,like,1\n")


def test_unknown_action_names_line():
    src = b"user_id,page_id,post_id,action,timestamp\nu1,p1,x1,loves,5\n"
    with pytest.raises(RowError, match="line 2") as exc:
        parse_interactions(src)
    assert exc.value.line == 2


def test_non_integer_timestamp():
    src = b"user_id,page_id,post_id,action,timestamp\nu1,p1,x1,like,1\nu1,p1,x1,like,soon\n"
    with pytest.raises(RowError, match="line 3"):
        parse_interactions(src)


def test_lenient_skips_and_counts():
    src = (b"user_id,page_id,post_id,action,timestamp\n"
           b"u1,p1,x1,loves,5\nu1,p1,x1,like,-1\n,p1,x1,like,1\nu2,p1,x1,like,7\n")
    d = parse_interactions(src, strict=False)
    assert len(d) == 1 and d.skipped == 3


def test_pages_table_membership(three_rows):
    pages = b"page_id,page_name,country\np1,One,IT\n"
    with pytest.raises(RowError, match="p2"):
        parse_interactions(three_rows, pages)
    pages = b"page_id,page_name,country\np1,One,IT\np2,Two,FR\n"
    d = parse_interactions(three_rows, pages)
    assert d.pages["p2"].country == "FR"


def test_summary_empty():
    s = summarize(Dataset())
    assert all(v == 0 for v in s.as_dict().values())


def test_summary_three_rows(three_rows):
    s = summarize(parse_interactions(three_rows))
    assert (s.posts, s.likes, s.likers, s.comments, s.commenters, s.users) == (3, 2, 2, 1, 1, 2)
    assert s.pages == 2


def test_share_only_users_not_counted():
    src = (b"user_id,page_id,post_id,action,timestamp\n"
           b"u1,p1,x1,like,1\nu9,p1,x1,share,2\n")
    s = summarize(parse_interactions(src))
    assert s.users == 1 and s.shares == 1


def test_summary_matches_recount(data_dir):
    import json
    d = parse_interactions(data_dir / "toy_interactions.csv", data_dir / "toy_pages.csv")
    golden = json.loads((data_dir / "toy_summary.json").read_text())
    assert len(d) == 1000
    assert summarize(d).as_dict() == golden["all"]
    for cc in ("IT", "FR"):
        assert summarize(filter_dataset(d, country=cc)).as_dict() == golden[cc]


def test_filter_examples(three_rows):
    d = parse_interactions(three_rows)
    assert len(filter_dataset(d, action="like")) == 2
    assert len(filter_dataset(d, window=(0, 100))) == 0
    assert len(filter_dataset(d, window=(100, 151))) == 2
    once = filter_dataset(d, action="like")
    assert filter_dataset(once, action="like") == once
    assert filter_dataset(d) == d


def test_filter_inverted_window(three_rows):
    with pytest.raises(ValueError):
        filter_dataset(parse_interactions(three_rows), window=(10, 10))


def test_country_filter_needs_pages(three_rows):
    with pytest.raises(ValueError):
        filter_dataset(parse_interactions(three_rows), country="IT")


ids = st.text(alphabet="abcxyz019_-", min_size=1, max_size=6)
records = st.lists(st.builds(
    InteractionRecord, ids, ids, ids,
    st.sampled_from(["like", "comment", "share"]),
    st.integers(min_value=0, max_value=2**40),
), max_size=40)


@given(records)
def test_round_trip(recs):
    d = Dataset(tuple(recs))
    buf = io.StringIO()
    write_interactions(d, buf)
    assert parse_interactions(buf.getvalue().encode()) == d


@given(records)
def test_summary_inequalities(recs):
    s = summarize(Dataset(tuple(recs)))
    assert s.likers <= s.users and s.commenters <= s.users
    assert s.users <= s.likers + s.commenters


@given(records, st.sampled_from([None, "like", "comment", "share"]),
       st.integers(0, 2**40), st.integers(1, 2**40))
def test_filter_shrinks_and_is_idempotent(recs, action, t0, span):
    d = Dataset(tuple(recs))
    f = filter_dataset(d, action=action, window=(t0, t0 + span))
    assert len(f) <= len(d)
    assert filter_dataset(f, action=action, window=(t0, t0 + span)) == f
