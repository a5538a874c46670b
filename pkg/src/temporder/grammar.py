"""Template grammar of time expressions and samplers over it.

Two categories: explicit datetimes ("Sept. 12, 1993", "10-12-2014") and
natural-language indicators ("two months ago", "past 5 weeks"). Rendering
style (month abbreviation, ordinal days, separators, number words) is part
of the slot assignment so that (template_id, slots) -> surface is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingSlot, OutOfDomain
from .normalize import (
    DEFAULT_ANCHOR,
    MONTHS_ABBR,
    MONTHS_FULL,
    NUMBER_WORDS,
    UNITS,
    AMBIGUOUS,
    OutOfRange,
    ReferenceAnchor,
    TimeInterval,
    Unparseable,
    compare,
    parse_timex,
)

EXPLICIT_DATETIME = "explicit_datetime"
NATURAL_LANGUAGE = "natural_language"
CATEGORIES = (EXPLICIT_DATETIME, NATURAL_LANGUAGE)

_YEARS = tuple(range(1900, 2050))
_MONTHS = tuple(range(1, 13))
_DAYS = tuple(range(1, 32))
_YY = tuple(range(0, 100))
_XX = tuple(range(1, 100))

_STYLE_DEFAULTS = {
    "month_style": "full",
    "day_style": "plain",
    "order": "mdy",
    "comma": True,
    "sep": "/",
    "pad": False,
    "num_style": "digit",
}


@dataclass(frozen=True)
class TimexTemplate:
    id: str
    category: str
    pattern: tuple[str, ...]
    slot_domains: dict[str, tuple] = field(default_factory=dict)

    def value_slots(self) -> tuple[str, ...]:
        return tuple(s for s in self.slot_domains if s not in _STYLE_DEFAULTS)

    def style_slots(self) -> tuple[str, ...]:
        return tuple(s for s in self.slot_domains if s in _STYLE_DEFAULTS)


@dataclass(frozen=True)
class TimexSample:
    surface: str
    template_id: str
    slots: dict
    interval: TimeInterval


@dataclass(frozen=True)
class TimexPairExample:
    t1: TimexSample
    t2: TimexSample
    label: str


_SEP = ("-", "/")
_BOOL = (False, True)
_MONTH_STYLES = ("full", "abbr")
_DAY_STYLES = ("plain", "ordinal")
_ORDERS = ("mdy", "dmy")
_NUM_STYLES = ("digit", "word")

_TEMPLATES = (
    TimexTemplate("yyyy", EXPLICIT_DATETIME, ("yyyy",), {"yyyy": _YEARS}),
    TimexTemplate("apos_yy", EXPLICIT_DATETIME, ("'", "yy"), {"yy": _YY}),
    TimexTemplate(
        "mm_dd_yy", EXPLICIT_DATETIME, ("mm", "dd", "yy"),
        {"mm": _MONTHS, "dd": _DAYS, "yy": _YY, "sep": _SEP, "pad": _BOOL},
    ),
    TimexTemplate(
        "mm_yy", EXPLICIT_DATETIME, ("mm", "yy"),
        {"mm": _MONTHS, "yy": _YY, "sep": _SEP, "pad": _BOOL},
    ),
    TimexTemplate(
        "mmm_yyyy", EXPLICIT_DATETIME, ("mm", "yyyy"),
        {"mm": _MONTHS, "yyyy": _YEARS, "month_style": _MONTH_STYLES},
    ),
    TimexTemplate(
        "mmm_dd_yyyy", EXPLICIT_DATETIME, ("mm", "dd", "yyyy"),
        {"mm": _MONTHS, "dd": _DAYS, "yyyy": _YEARS,
         "month_style": _MONTH_STYLES, "day_style": _DAY_STYLES,
         "order": _ORDERS, "comma": _BOOL},
    ),
    TimexTemplate(
        "mm_dd_yyyy", EXPLICIT_DATETIME, ("mm", "dd", "yyyy"),
        {"mm": _MONTHS, "dd": _DAYS, "yyyy": _YEARS, "sep": _SEP, "pad": _BOOL},
    ),
    TimexTemplate(
        "xx_units_later", NATURAL_LANGUAGE, ("xx", "unit", "later"),
        {"xx": _XX, "unit": UNITS, "num_style": _NUM_STYLES},
    ),
    TimexTemplate(
        "xx_units_before", NATURAL_LANGUAGE, ("xx", "unit", "before"),
        {"xx": _XX, "unit": UNITS, "num_style": _NUM_STYLES},
    ),
    TimexTemplate(
        "xx_units_ago", NATURAL_LANGUAGE, ("xx", "unit", "ago"),
        {"xx": _XX, "unit": UNITS, "num_style": _NUM_STYLES},
    ),
    TimexTemplate("now", NATURAL_LANGUAGE, ("now",), {}),
    TimexTemplate(
        "past_xx_units", NATURAL_LANGUAGE, ("past", "xx", "unit"),
        {"xx": _XX, "unit": UNITS, "num_style": _NUM_STYLES},
    ),
)

_BY_ID = {t.id: t for t in _TEMPLATES}


def list_templates() -> list[TimexTemplate]:
    """All built-in templates, in a stable order."""
    return list(_TEMPLATES)


def template_by_id(template_id: str) -> TimexTemplate:
    try:
        return _BY_ID[template_id]
    except KeyError:
        raise MissingSlot(f"unknown template {template_id!r}") from None


def templates_json() -> list[dict]:
    """JSON-serializable dump of the template set for CLI inspection."""
    out = []
    for t in _TEMPLATES:
        out.append({
            "id": t.id,
            "category": t.category,
            "pattern": list(t.pattern),
            "slot_domains": {k: list(v) for k, v in t.slot_domains.items()},
        })
    return out


def _ordinal(n: int) -> str:
    if 11 <= n % 100 <= 13:
        return f"{n}th"
    return f"{n}{({1: 'st', 2: 'nd', 3: 'rd'}.get(n % 10, 'th'))}"


def _month_name(month: int, style: str) -> str:
    return (MONTHS_FULL if style == "full" else MONTHS_ABBR)[month - 1]


def _num(value: int, pad: bool) -> str:
    return f"{value:02d}" if pad else str(value)


def _magnitude_text(xx: int, num_style: str) -> str:
    if num_style == "word":
        if xx > len(NUMBER_WORDS):
            raise OutOfDomain(f"no number word for {xx}")
        return NUMBER_WORDS[xx - 1]
    return str(xx)


def _unit_text(unit: str, xx: int) -> str:
    return unit if xx == 1 else unit + "s"


def render(template: TimexTemplate, slots: dict) -> str:
    """Deterministic surface string for a full slot assignment.

    Style slots may be omitted and fall back to fixed defaults; value slots
    are required. Raises MissingSlot / OutOfDomain.
    """
    for name in template.value_slots():
        if name not in slots:
            raise MissingSlot(f"template {template.id!r} needs slot {name!r}")
    for name, value in slots.items():
        if name not in template.slot_domains:
            raise OutOfDomain(f"template {template.id!r} has no slot {name!r}")
        if value not in template.slot_domains[name]:
            raise OutOfDomain(f"slot {name!r}={value!r} outside domain")
    get = lambda name: slots.get(name, _STYLE_DEFAULTS.get(name))

    tid = template.id
    if tid == "yyyy":
        return str(slots["yyyy"])
    if tid == "apos_yy":
        return f"'{slots['yy']:02d}"
    if tid == "mm_yy":
        sep, pad = get("sep"), get("pad")
        return f"{_num(slots['mm'], pad)}{sep}{slots['yy']:02d}"
    if tid == "mm_dd_yy":
        sep, pad = get("sep"), get("pad")
        return f"{_num(slots['mm'], pad)}{sep}{_num(slots['dd'], pad)}{sep}{slots['yy']:02d}"
    if tid == "mm_dd_yyyy":
        sep, pad = get("sep"), get("pad")
        return f"{_num(slots['mm'], pad)}{sep}{_num(slots['dd'], pad)}{sep}{slots['yyyy']}"
    if tid == "mmm_yyyy":
        return f"{_month_name(slots['mm'], get('month_style'))} {slots['yyyy']}"
    if tid == "mmm_dd_yyyy":
        month = _month_name(slots["mm"], get("month_style"))
        day = _ordinal(slots["dd"]) if get("day_style") == "ordinal" else str(slots["dd"])
        if get("order") == "dmy":
            return f"{day} {month} {slots['yyyy']}"
        comma = "," if get("comma") else ""
        return f"{month} {day}{comma} {slots['yyyy']}"
    if tid in ("xx_units_later", "xx_units_before", "xx_units_ago"):
        xx = slots["xx"]
        word = _magnitude_text(xx, get("num_style"))
        suffix = {"xx_units_later": "later", "xx_units_before": "before",
                  "xx_units_ago": "ago"}[tid]
        return f"{word} {_unit_text(slots['unit'], xx)} {suffix}"
    if tid == "now":
        return "now"
    if tid == "past_xx_units":
        xx = slots["xx"]
        word = _magnitude_text(xx, get("num_style"))
        return f"past {word} {_unit_text(slots['unit'], xx)}"
    raise MissingSlot(f"unknown template {tid!r}")


def _domain_pick(rng: np.random.Generator, values: tuple):
    return values[int(rng.integers(len(values)))]


def sample_timex(rng: np.random.Generator, category: str,
                 anchor: ReferenceAnchor = DEFAULT_ANCHOR) -> TimexSample:
    """Uniform template then uniform slots; resamples calendar-invalid or
    out-of-range combinations internally."""
    if category not in CATEGORIES:
        raise OutOfDomain(f"unknown category {category!r}")
    pool = [t for t in _TEMPLATES if t.category == category]
    while True:
        template = pool[int(rng.integers(len(pool)))]
        slots = {}
        for name, domain in template.slot_domains.items():
            slots[name] = _domain_pick(rng, domain)
        if slots.get("num_style") == "word" and slots["xx"] > len(NUMBER_WORDS):
            slots["num_style"] = "digit"
        try:
            surface = render(template, slots)
            interval = parse_timex(surface, anchor)
        except (Unparseable, OutOfRange):
            continue
        return TimexSample(surface, template.id, slots, interval)


def sample_pair(rng: np.random.Generator, explicit_fraction: float,
                anchor: ReferenceAnchor = DEFAULT_ANCHOR) -> TimexPairExample:
    """One labeled pair; both members share a category, ambiguous pairs are
    discarded and resampled."""
    if not 0.0 <= explicit_fraction <= 1.0:
        raise OutOfDomain(f"explicit_fraction {explicit_fraction} outside [0, 1]")
    while True:
        category = (EXPLICIT_DATETIME if rng.random() < explicit_fraction
                    else NATURAL_LANGUAGE)
        t1 = sample_timex(rng, category, anchor)
        t2 = sample_timex(rng, category, anchor)
        label = compare(t1.interval, t2.interval)
        if label == AMBIGUOUS:
            continue
        return TimexPairExample(t1, t2, label)


def grammar_alphabet() -> str:
    """Every character any template rendering can contain, sorted."""
    chars = set("0123456789 ,.'-/")
    for word in MONTHS_FULL + MONTHS_ABBR + NUMBER_WORDS + UNITS:
        chars.update(word)
    chars.update("now past later ago before st nd rd th")
    return "".join(sorted(chars))
