"""Reading, filtering and summarizing user/page interaction logs.

Interaction CSV header: ``user_id,page_id,post_id,action,timestamp``
Pages table header:     ``page_id,page_name,country``
"""
from __future__ import annotations

import csv
import io
import logging
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, NamedTuple

log = logging.getLogger(__name__)

INTERACTION_HEADER = ("user_id", "page_id", "post_id", "action", "timestamp")
PAGES_HEADER = ("page_id", "page_name", "country")
ACTIONS = ("like", "comment", "share")


class FormatError(ValueError):
    """The file as a whole is unreadable (bad header, wrong encoding)."""


class RowError(ValueError):
    """A single row failed validation."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InteractionRecord(NamedTuple):
    user_id: str
    page_id: str
    post_id: str
    action: str
    timestamp: int


class PageInfo(NamedTuple):
    name: str
    country: str


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of interaction records.

    ``pages`` maps page_id to its name and country; it is empty when no pages
    table was supplied. ``skipped`` counts rows dropped in lenient parsing and
    does not take part in equality.
    """

    records: tuple[InteractionRecord, ...] = ()
    pages: dict[str, PageInfo] = field(default_factory=dict)
    country: str | None = None
    skipped: int = field(default=0, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def page_ids(self) -> list[str]:
        """Known pages: the pages table if present, else pages seen in records."""
        if self.pages:
            return sorted(self.pages)
        return sorted({r.page_id for r in self.records})


@dataclass(frozen=True)
class SummaryStats:
    pages: int
    posts: int
    likes: int
    likers: int
    comments: int
    commenters: int
    shares: int
    users: int

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


def _open_text(source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="", encoding="utf-8"), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"), newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def _check_header(reader, expected: tuple[str, ...], what: str) -> None:
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError(f"{what}: empty file, expected header {','.join(expected)}") from None
    if tuple(h.strip() for h in header) != expected:
        raise FormatError(
            f"{what}: expected header {','.join(expected)!r}, got {','.join(header)!r}"
        )


def _parse_row(row: list[str], line: int) -> InteractionRecord:
    if len(row) != len(INTERACTION_HEADER):
        raise RowError(line, f"expected {len(INTERACTION_HEADER)} fields, got {len(row)}")
    user_id, page_id, post_id, action, ts = (x.strip() for x in row)
    for name, value in (("user_id", user_id), ("page_id", page_id), ("post_id", post_id)):
        if not value:
            raise RowError(line, f"empty {name}")
    if action not in ACTIONS:
        raise RowError(line, f"unknown action {action!r} (expected one of {', '.join(ACTIONS)})")
    try:
        timestamp = int(ts)
    except ValueError:
        raise RowError(line, f"timestamp {ts!r} is not an integer") from None
    if timestamp < 0:
        raise RowError(line, f"negative timestamp {timestamp}")
    return InteractionRecord(user_id, page_id, post_id, action, timestamp)


def parse_pages(source) -> dict[str, PageInfo]:
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        _check_header(reader, PAGES_HEADER, "pages table")
        pages: dict[str, PageInfo] = {}
        for row in reader:
            if not row:
                continue
            if len(row) != 3 or not row[0].strip():
                raise RowError(reader.line_num, "malformed pages row")
            page_id, name, country = (x.strip() for x in row)
            pages[page_id] = PageInfo(name, country)
        return pages
    finally:
        if owned:
            stream.close()


def parse_interactions(source, pages_table=None, strict: bool = True,
                       country: str | None = None) -> Dataset:
    """Parse an interaction CSV into a :class:`Dataset`.

    ``source`` and ``pages_table`` may be paths, bytes, or text/binary
    streams. In strict mode the first bad row raises :class:`RowError`; in
    lenient mode bad rows are skipped and counted in ``Dataset.skipped``.
    """
    pages = parse_pages(pages_table) if pages_table is not None else {}
    stream, owned = _open_text(source)
    records: list[InteractionRecord] = []
    skipped = 0
    try:
        reader = csv.reader(stream)
        _check_header(reader, INTERACTION_HEADER, "interactions")
        for row in reader:
            if not row:
                continue
            try:
                rec = _parse_row(row, reader.line_num)
                if pages and rec.page_id not in pages:
                    raise RowError(reader.line_num, f"page {rec.page_id!r} not in pages table")
            except RowError:
                if strict:
                    raise
                skipped += 1
                continue
            records.append(rec)
    except UnicodeDecodeError as exc:
        raise FormatError(f"interactions: not UTF-8 text ({exc})") from None
    finally:
        if owned:
            stream.close()
    if skipped:
        log.warning("skipped %d malformed rows", skipped)
    return Dataset(tuple(records), pages, country, skipped)


def write_interactions(d: Dataset, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(INTERACTION_HEADER)
    writer.writerows(d.records)


def write_pages(d: Dataset, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(PAGES_HEADER)
    for page_id in sorted(d.pages):
        info = d.pages[page_id]
        writer.writerow((page_id, info.name, info.country))


def summarize(d: Dataset) -> SummaryStats:
    """Dataset breakdown counts.

    ``users`` counts people with at least one like or comment; share-only
    users are left out.
    """
    likers, commenters, posts = set(), set(), set()
    counts = dict.fromkeys(ACTIONS, 0)
    for r in d.records:
        counts[r.action] += 1
        posts.add(r.post_id)
        if r.action == "like":
            likers.add(r.user_id)
        elif r.action == "comment":
            commenters.add(r.user_id)
    return SummaryStats(
        pages=len(d.page_ids()),
        posts=len(posts),
        likes=counts["like"],
        likers=len(likers),
        comments=counts["comment"],
        commenters=len(commenters),
        shares=counts["share"],
        users=len(likers | commenters),
    )


def filter_dataset(d: Dataset, action: str | None = None,
                   window: tuple[int, int] | None = None,
                   country: str | None = None) -> Dataset:
    """Keep records matching every given predicate.

    ``window`` is half-open ``[t0, t1)``. Filtering by country needs a pages
    table and also restricts the table to that country.
    """
    if action is not None and action not in ACTIONS:
        raise ValueError(f"unknown action {action!r}")
    if window is not None:
        t0, t1 = window
        if not t0 < t1:
            raise ValueError(f"window start {t0} must precede end {t1}")
    pages = d.pages
    keep_pages = None
    if country is not None:
        if not d.pages:
            raise ValueError("country filter needs a pages table")
        pages = {k: v for k, v in d.pages.items() if v.country == country}
        keep_pages = pages.keys()

    def ok(r: InteractionRecord) -> bool:
        if action is not None and r.action != action:
            return False
        if window is not None and not (window[0] <= r.timestamp < window[1]):
            return False
        if keep_pages is not None and r.page_id not in keep_pages:
            return False
        return True

    records = tuple(r for r in d.records if ok(r))
    return Dataset(records, pages, country if country is not None else d.country)


def counts_per(d: Dataset, unit: str, action: str) -> list[int]:
    """Number of ``action`` records per post or per user, in first-seen order."""
    key = {"post": 2, "user": 0, "page": 1}[unit]
    out: dict[str, int] = {}
    for r in d.records:
        if r.action == action:
            out[r[key]] = out.get(r[key], 0) + 1
    return list(out.values())


def from_records(records: Iterable[tuple], pages: dict[str, PageInfo] | None = None) -> Dataset:
    """Build a Dataset from in-memory tuples; used by tests and the simulator."""
    return Dataset(tuple(InteractionRecord(*r) for r in records), dict(pages or {}))
