"""Timex normalization onto a shared day-offset timeline.

Every surface form the grammar can emit parses to a `TimeInterval` whose
endpoints are integer day offsets from 1900-01-01 (day 0). Relative
expressions ("two months ago") are resolved against a `ReferenceAnchor`.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass

from .errors import OutOfRange, Unparseable

EPOCH = datetime.date(1900, 1, 1)
YEAR_MIN = 1900
YEAR_MAX = 2049

BEFORE = "before"
AFTER = "after"
SIMULTANEOUS = "simultaneous"
AMBIGUOUS = "ambiguous"

# Surface lexicon. The grammar renders from these tables; the parser inverts
# them, so the two sides cannot drift apart.
MONTHS_FULL = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)
MONTHS_ABBR = (
    "Jan.", "Feb.", "Mar.", "Apr.", "May", "June",
    "July", "Aug.", "Sept.", "Oct.", "Nov.", "Dec.",
)
NUMBER_WORDS = (
    "one", "two", "three", "four", "five", "six",
    "seven", "eight", "nine", "ten", "eleven", "twelve",
)
UNITS = ("day", "week", "month", "year")

_MONTH_BY_NAME = {name.lower(): i + 1 for i, name in enumerate(MONTHS_FULL)}
_MONTH_BY_NAME.update({name.lower(): i + 1 for i, name in enumerate(MONTHS_ABBR)})
_NUMBER_BY_WORD = {w: i + 1 for i, w in enumerate(NUMBER_WORDS)}


@dataclass(frozen=True)
class TimeInterval:
    """[start_day, end_day] day offsets from 1900-01-01, plus granularity.

    Granularity is one of day / month / year / point / span; `span` covers
    anchored windows such as "past 5 weeks" whose extent is not a calendar
    unit.
    """

    start_day: int
    end_day: int
    granularity: str

    def __post_init__(self):
        if self.start_day > self.end_day:
            raise ValueError("start_day must not exceed end_day")
        if self.granularity in ("day", "point") and self.start_day != self.end_day:
            raise ValueError(f"{self.granularity} interval must be a single day")

    def iso(self) -> str:
        return f"{date_of_day(self.start_day).isoformat()}/{date_of_day(self.end_day).isoformat()}"


@dataclass(frozen=True)
class ReferenceAnchor:
    """The document "now" against which relative timexes resolve."""

    anchor_day: int

    def __post_init__(self):
        date_of_day(self.anchor_day)  # range check

    @classmethod
    def from_iso(cls, iso: str) -> "ReferenceAnchor":
        try:
            d = datetime.date.fromisoformat(iso)
        except ValueError as exc:
            raise Unparseable(f"bad anchor date {iso!r}") from exc
        return cls(day_of_date(d))

    def date(self) -> datetime.date:
        return date_of_day(self.anchor_day)


def day_of_date(d: datetime.date) -> int:
    return (d - EPOCH).days


def date_of_day(day: int) -> datetime.date:
    d = EPOCH + datetime.timedelta(days=day)
    if not YEAR_MIN <= d.year <= YEAR_MAX:
        raise OutOfRange(f"day offset {day} resolves to {d.isoformat()}")
    return d


DEFAULT_ANCHOR = ReferenceAnchor.from_iso("1998-06-15")


def resolve_two_digit_year(yy: int) -> int:
    """Pivot-50 rule: 63 -> 1963, 5 -> 2005, 49 -> 2049, 50 -> 1950."""
    if not 0 <= yy <= 99:
        raise OutOfRange(f"two-digit year {yy} outside 0-99")
    return 2000 + yy if yy < 50 else 1900 + yy


def _checked_date(year: int, month: int, day: int) -> datetime.date:
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise OutOfRange(f"{year:04d}-{month:02d}-{day:02d} outside supported years")
    try:
        return datetime.date(year, month, day)
    except ValueError as exc:
        raise Unparseable(f"invalid calendar date {year}-{month}-{day}") from exc


def year_interval(year: int) -> TimeInterval:
    start = _checked_date(year, 1, 1)
    end = _checked_date(year, 12, 31)
    return TimeInterval(day_of_date(start), day_of_date(end), "year")


def month_interval(year: int, month: int) -> TimeInterval:
    start = _checked_date(year, month, 1)
    end = start.replace(day=_month_length(year, month))
    return TimeInterval(day_of_date(start), day_of_date(end), "month")


def day_interval(year: int, month: int, day: int) -> TimeInterval:
    offset = day_of_date(_checked_date(year, month, day))
    return TimeInterval(offset, offset, "day")


def _month_length(year: int, month: int) -> int:
    if month == 12:
        return 31
    first_next = datetime.date(year, month + 1, 1)
    return (first_next - datetime.timedelta(days=1)).day


def shift_date(d: datetime.date, count: int, unit: str) -> datetime.date:
    """Calendar shift with day-of-month clamping for month/year steps."""
    if unit == "day":
        out = d + datetime.timedelta(days=count)
    elif unit == "week":
        out = d + datetime.timedelta(days=7 * count)
    elif unit == "month":
        total = d.year * 12 + (d.month - 1) + count
        year, month0 = divmod(total, 12)
        month = month0 + 1
        if not YEAR_MIN <= year <= YEAR_MAX:
            raise OutOfRange(f"month shift lands in year {year}")
        out = datetime.date(year, month, min(d.day, _month_length(year, month)))
    elif unit == "year":
        year = d.year + count
        if not YEAR_MIN <= year <= YEAR_MAX:
            raise OutOfRange(f"year shift lands in year {year}")
        out = datetime.date(year, d.month, min(d.day, _month_length(year, d.month)))
    else:
        raise Unparseable(f"unknown unit {unit!r}")
    if not YEAR_MIN <= out.year <= YEAR_MAX:
        raise OutOfRange(f"shift lands on {out.isoformat()}")
    return out


# --- surface parsing ---

_MONTH_NAME = "|".join(
    sorted({re.escape(m) for m in MONTHS_FULL + MONTHS_ABBR}, key=len, reverse=True)
)
_ORD = r"(?:st|nd|rd|th)?"
_NUM_WORD = "|".join(NUMBER_WORDS)

_RE_YYYY = re.compile(r"^(\d{4})$")
_RE_APOS_YY = re.compile(r"^'(\d{2})$")
_RE_MM_YY = re.compile(r"^(\d{1,2})([/-])(\d{2})$")
_RE_MM_DD_YY = re.compile(r"^(\d{1,2})([/-])(\d{1,2})\2(\d{2})$")
_RE_MM_DD_YYYY = re.compile(r"^(\d{1,2})([/-])(\d{1,2})\2(\d{4})$")
_RE_MMM_YYYY = re.compile(rf"^({_MONTH_NAME}) (\d{{4}})$", re.IGNORECASE)
_RE_MDY = re.compile(rf"^({_MONTH_NAME}) (\d{{1,2}}){_ORD},? (\d{{4}})$", re.IGNORECASE)
_RE_DMY = re.compile(rf"^(\d{{1,2}}){_ORD} ({_MONTH_NAME}),? (\d{{4}})$", re.IGNORECASE)
_RE_RELATIVE = re.compile(
    rf"^(\d{{1,2}}|{_NUM_WORD}) (day|week|month|year)s? (later|ago|before)$",
    re.IGNORECASE,
)
_RE_PAST = re.compile(
    rf"^past (\d{{1,2}}|{_NUM_WORD}) (day|week|month|year)s?$", re.IGNORECASE
)


def _month_number(name: str) -> int:
    return _MONTH_BY_NAME[name.lower()]


def _magnitude(text: str) -> int:
    text = text.lower()
    count = _NUMBER_BY_WORD.get(text) or int(text)
    if not 1 <= count <= 99:
        raise Unparseable(f"magnitude {count} outside the 1-99 slot domain")
    return count


def parse_timex(surface: str, anchor: ReferenceAnchor = DEFAULT_ANCHOR) -> TimeInterval:
    """Parse any rendering of a built-in template into a TimeInterval.

    Raises Unparseable for strings outside the grammar and OutOfRange when
    the resolved date leaves the 1900-2049 window.
    """
    s = surface.strip()
    if s.lower() == "now":
        return TimeInterval(anchor.anchor_day, anchor.anchor_day, "point")

    if m := _RE_YYYY.match(s):
        return year_interval(int(m.group(1)))
    if m := _RE_APOS_YY.match(s):
        return year_interval(resolve_two_digit_year(int(m.group(1))))
    if m := _RE_MM_DD_YY.match(s):
        mm, _, dd, yy = m.groups()
        return _checked_day(resolve_two_digit_year(int(yy)), int(mm), int(dd))
    if m := _RE_MM_DD_YYYY.match(s):
        mm, _, dd, yyyy = m.groups()
        return _checked_day(int(yyyy), int(mm), int(dd))
    if m := _RE_MM_YY.match(s):
        mm, _, yy = m.groups()
        if not 1 <= int(mm) <= 12:
            raise Unparseable(f"bad month in {surface!r}")
        return month_interval(resolve_two_digit_year(int(yy)), int(mm))
    if m := _RE_MMM_YYYY.match(s):
        return month_interval(int(m.group(2)), _month_number(m.group(1)))
    if m := _RE_MDY.match(s):
        return _checked_day(int(m.group(3)), _month_number(m.group(1)), int(m.group(2)))
    if m := _RE_DMY.match(s):
        return _checked_day(int(m.group(3)), _month_number(m.group(2)), int(m.group(1)))
    if m := _RE_RELATIVE.match(s):
        count = _magnitude(m.group(1))
        unit = m.group(2).lower()
        sign = 1 if m.group(3).lower() == "later" else -1
        point = shift_date(anchor.date(), sign * count, unit)
        off = day_of_date(point)
        return TimeInterval(off, off, "point")
    if m := _RE_PAST.match(s):
        count = _magnitude(m.group(1))
        start = shift_date(anchor.date(), -count, m.group(2).lower())
        return TimeInterval(day_of_date(start), anchor.anchor_day, "span")

    raise Unparseable(f"not in the timex grammar: {surface!r}")


def _checked_day(year: int, month: int, day: int) -> TimeInterval:
    if not 1 <= month <= 12:
        raise Unparseable(f"bad month {month}")
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise OutOfRange(f"{year:04d}-{month:02d}-{day:02d} outside supported years")
    if not 1 <= day <= _month_length(year, month):
        raise Unparseable(f"invalid calendar date {year}-{month}-{day}")
    return day_interval(year, month, day)


def compare(a: TimeInterval, b: TimeInterval) -> str:
    """Interval order: before / after / simultaneous / ambiguous (overlap)."""
    if a.end_day < b.start_day:
        return BEFORE
    if a.start_day > b.end_day:
        return AFTER
    if a.start_day == b.start_day and a.end_day == b.end_day:
        return SIMULTANEOUS
    return AMBIGUOUS
