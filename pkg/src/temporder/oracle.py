"""Brute-force calendar comparator used to audit generated labels.

This is the independent route: it never touches the day-offset normalizer.
Intervals are pairs of (year, month, day) tuples, arithmetic is done
tuple-wise (day steps roll over month ends one day at a time), and ordering
is plain lexicographic tuple comparison.
"""

from __future__ import annotations

from .errors import OutOfRange

YEAR_MIN = 1900
YEAR_MAX = 2049

_DAYS = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]


def is_leap(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def days_in_month(year: int, month: int) -> int:
    if month == 2 and is_leap(year):
        return 29
    return _DAYS[month - 1]


def _check_range(ymd):
    if not YEAR_MIN <= ymd[0] <= YEAR_MAX:
        raise OutOfRange(f"{ymd} outside {YEAR_MIN}-{YEAR_MAX}")
    return ymd


def add_days(ymd, n: int):
    y, m, d = ymd
    step = 1 if n >= 0 else -1
    for _ in range(abs(n)):
        d += step
        if d > days_in_month(y, m):
            d = 1
            m += 1
            if m > 12:
                m = 1
                y += 1
        elif d < 1:
            m -= 1
            if m < 1:
                m = 12
                y -= 1
            d = days_in_month(y, m)
    return _check_range((y, m, d))


def add_months(ymd, n: int):
    y, m, d = ymd
    total = y * 12 + (m - 1) + n
    y2, m2 = divmod(total, 12)
    m2 += 1
    return _check_range((y2, m2, min(d, days_in_month(y2, m2))))


def add_years(ymd, n: int):
    y, m, d = ymd
    y2 = y + n
    return _check_range((y2, m, min(d, days_in_month(y2, m))))


def shift(ymd, count: int, unit: str):
    if unit == "day":
        return add_days(ymd, count)
    if unit == "week":
        return add_days(ymd, 7 * count)
    if unit == "month":
        return add_months(ymd, count)
    if unit == "year":
        return add_years(ymd, count)
    raise ValueError(f"unknown unit {unit!r}")


def _pivot_year(yy: int) -> int:
    return 2000 + yy if yy < 50 else 1900 + yy


def interval_from_slots(template_id: str, slots: dict, anchor) -> tuple:
    """Interval ((y,m,d), (y,m,d)) a template instance denotes.

    `anchor` is the reference (y, m, d) tuple for relative templates.
    Only value slots are consulted; surface-style slots are irrelevant here.
    """
    if template_id in ("yyyy", "apos_yy"):
        y = slots["yyyy"] if template_id == "yyyy" else _pivot_year(slots["yy"])
        _check_range((y, 1, 1))
        return (y, 1, 1), (y, 12, 31)
    if template_id in ("mm_yy", "mmm_yyyy"):
        y = _pivot_year(slots["yy"]) if template_id == "mm_yy" else slots["yyyy"]
        m = slots["mm"]
        _check_range((y, m, 1))
        return (y, m, 1), (y, m, days_in_month(y, m))
    if template_id in ("mm_dd_yy", "mm_dd_yyyy", "mmm_dd_yyyy"):
        y = _pivot_year(slots["yy"]) if template_id == "mm_dd_yy" else slots["yyyy"]
        point = _check_range((y, slots["mm"], slots["dd"]))
        return point, point
    if template_id == "now":
        return anchor, anchor
    if template_id == "xx_units_later":
        point = shift(anchor, slots["xx"], slots["unit"])
        return point, point
    if template_id in ("xx_units_before", "xx_units_ago"):
        point = shift(anchor, -slots["xx"], slots["unit"])
        return point, point
    if template_id == "past_xx_units":
        return shift(anchor, -slots["xx"], slots["unit"]), anchor
    raise ValueError(f"unknown template {template_id!r}")


def compare_intervals(a: tuple, b: tuple) -> str:
    """Order two tuple intervals: before / after / simultaneous / ambiguous."""
    a_start, a_end = a
    b_start, b_end = b
    if a_end < b_start:
        return "before"
    if a_start > b_end:
        return "after"
    if a_start == b_start and a_end == b_end:
        return "simultaneous"
    return "ambiguous"


def label_pair(t1_template: str, t1_slots: dict, t2_template: str, t2_slots: dict,
               anchor) -> str:
    """Gold label for a generated pair, straight from template slots."""
    return compare_intervals(
        interval_from_slots(t1_template, t1_slots, anchor),
        interval_from_slots(t2_template, t2_slots, anchor),
    )
