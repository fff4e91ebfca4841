"""Ranking precision under the stronger-always-wins model.

Every admissible assignment of strengths ``1..n`` to entry slots is played
out deterministically and the resulting placements are tallied per
strength.  A class is *precise* when the strengths that deserve it land
there in every assignment.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import kernels
from .bracket import BracketGraph, BracketLabError, Format, PlacementClass, RoundSchedule, validate, InvalidFormatError

MAX_ASSIGNMENTS = math.factorial(10)


class EnumerationBoundError(BracketLabError):
    pass


def entry_labels(fmt: Format) -> tuple[str, ...]:
    if isinstance(fmt, RoundSchedule):
        return tuple(f"P{k}" for k in range(1, fmt.n + 1))
    return fmt.entry_slots


def _n(fmt: Format) -> int:
    return fmt.n


@dataclass(frozen=True)
class StrengthAssignment:
    """Strength per entry slot, in entry-slot order (larger is stronger)."""

    strengths: tuple[int, ...]

    def __post_init__(self):
        s = tuple(int(x) for x in self.strengths)
        object.__setattr__(self, "strengths", s)
        if sorted(s) != list(range(1, len(s) + 1)):
            raise BracketLabError(f"strengths must be a permutation of 1..{len(s)}, got {s}")

    @classmethod
    def from_mapping(cls, fmt: Format, mapping: dict[str, int]) -> "StrengthAssignment":
        return cls(tuple(mapping[s] for s in entry_labels(fmt)))


@dataclass(frozen=True)
class Seeded:
    """Restrict enumeration: each slot group receives exactly its strength set."""

    groups: tuple[tuple[tuple[str, ...], frozenset[int]], ...]

    @classmethod
    def split(cls, fmt: Format, upper, lower) -> "Seeded":
        """First half of the entry slots gets ``upper``, second half ``lower``."""
        labels = entry_labels(fmt)
        half = len(labels) // 2
        return cls(((labels[:half], frozenset(upper)), (labels[half:], frozenset(lower))))

    @classmethod
    def top_half(cls, fmt: Format) -> "Seeded":
        n = _n(fmt)
        return cls.split(fmt, range(n // 2 + 1, n + 1), range(1, n // 2 + 1))


def _placement_rr(wins: list[int]) -> list[PlacementClass]:
    out = []
    for w in wins:
        above = sum(1 for x in wins if x > w)
        tied = sum(1 for x in wins if x == w)
        out.append(PlacementClass(above + 1, above + tied))
    return out


def simulate(fmt: Format, assignment: StrengthAssignment) -> dict[int, PlacementClass]:
    """Play every match in favour of the stronger side; placement per strength."""
    strengths = assignment.strengths
    if len(strengths) != _n(fmt):
        raise BracketLabError("assignment size does not match the format")
    if isinstance(fmt, RoundSchedule):
        wins = [0] * fmt.n
        for a, b in fmt.pairs():
            wins[a if strengths[a] > strengths[b] else b] += 1
        return {strengths[p]: c for p, c in enumerate(_placement_rr(wins))}

    at = dict(zip(fmt.entry_slots, strengths))
    feeds = {}
    placed = {}
    for m in fmt.ordered_matches():
        a, b = (at[s.slot] if s.slot is not None else feeds[(s.match, s.feed)] for s in m.sources)
        result = {"win": max(a, b), "loss": min(a, b)}
        for outcome, who in result.items():
            d = m.dest(outcome)
            if d.is_placement:
                placed[who] = fmt.placement(d.placement)
            else:
                feeds[(m.id, outcome)] = who
    return placed


@dataclass
class RankTally:
    classes: tuple[PlacementClass, ...]
    counts: np.ndarray  # (n strengths, k classes), row s-1 is strength s
    total: int

    @property
    def n(self) -> int:
        return self.counts.shape[0]

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.classes]

    def _col(self, label: str) -> int:
        return self.labels.index(label)

    def count(self, strength: int, label: str) -> int:
        return int(self.counts[strength - 1, self._col(label)])

    def percent(self, strength: int, label: str) -> int:
        return round_percent(self.count(strength, label), self.total)

    def row(self, strength: int) -> dict[str, int]:
        return {c.label: int(x) for c, x in zip(self.classes, self.counts[strength - 1])}

    def modal(self, strength: int) -> set[str]:
        r = self.counts[strength - 1]
        return {c.label for c, x in zip(self.classes, r) if x == r.max()}

    def problems(self) -> list[str]:
        """Row and column sum invariants; empty when the tally is consistent."""
        out = []
        for s, r in enumerate(self.counts, 1):
            if r.sum() != self.total:
                out.append(f"strength {s} row sums to {r.sum()}, expected {self.total}")
        for c, col in zip(self.classes, self.counts.T):
            if col.sum() != c.capacity * self.total:
                out.append(f"class {c.label} column sums to {col.sum()}, expected {c.capacity * self.total}")
        return out

    def __add__(self, other: "RankTally") -> "RankTally":
        if self.labels != other.labels:
            raise BracketLabError("cannot merge tallies over different classes")
        return RankTally(self.classes, self.counts + other.counts, self.total + other.total)

    # -- export -----------------------------------------------------------

    def records(self, expected: dict[int, str] | None = None) -> list[dict]:
        out = []
        for s in range(1, self.n + 1):
            modal = self.modal(s)
            for c in self.classes:
                cnt = self.count(s, c.label)
                rec = {"strength": s, "class": c.label, "count": cnt,
                       "percent": round_percent(cnt, self.total), "modal": c.label in modal}
                if expected is not None:
                    rec["expected"] = expected.get(s) == c.label
                out.append(rec)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["strength", "class", "count", "percent"])
        for rec in self.records():
            w.writerow([rec["strength"], rec["class"], rec["count"], rec["percent"]])
        w.writerow(["total", "", self.total, 100])
        return buf.getvalue()

    def to_json(self, expected: dict[int, str] | None = None, **extra) -> str:
        doc = {
            "total": self.total,
            "classes": [{"label": c.label, "rank_lo": c.rank_lo, "rank_hi": c.rank_hi} for c in self.classes],
            "rows": self.records(expected),
        }
        doc.update(extra)
        return json.dumps(doc, indent=2)

    @classmethod
    def from_csv(cls, text: str) -> "RankTally":
        rows = list(csv.DictReader(io.StringIO(text)))
        total = next(int(r["count"]) for r in rows if r["strength"] == "total")
        body = [r for r in rows if r["strength"] != "total"]
        labels = list(dict.fromkeys(r["class"] for r in body))
        classes = tuple(_parse_label(lab) for lab in labels)
        n = max(int(r["strength"]) for r in body)
        counts = np.zeros((n, len(labels)), dtype=np.int64)
        for r in body:
            counts[int(r["strength"]) - 1, labels.index(r["class"])] = int(r["count"])
        return cls(classes, counts, total)

    @classmethod
    def from_json(cls, text: str) -> "RankTally":
        doc = json.loads(text)
        classes = tuple(PlacementClass(c["rank_lo"], c["rank_hi"], c["label"]) for c in doc["classes"])
        labels = [c.label for c in classes]
        n = max(r["strength"] for r in doc["rows"])
        counts = np.zeros((n, len(classes)), dtype=np.int64)
        for r in doc["rows"]:
            counts[r["strength"] - 1, labels.index(r["class"])] = r["count"]
        return cls(classes, counts, doc["total"])


def _parse_label(label: str) -> PlacementClass:
    head = label.rstrip("stndrh")
    if "-" in head:
        lo, hi = head.split("-")
        return PlacementClass(int(lo), int(hi), label)
    return PlacementClass(int(head), int(head), label)


def round_percent(count: int, total: int) -> int:
    """Whole percent, halves rounded up."""
    return (200 * count + total) // (2 * total)


# -- enumeration ----------------------------------------------------------


def _groups(fmt: Format, constraint: Seeded | None):
    labels = entry_labels(fmt)
    index = {lab: k for k, lab in enumerate(labels)}
    n = len(labels)
    if constraint is None:
        return [(list(range(n)), list(range(1, n + 1)))]
    groups, seen_slots, seen_vals = [], set(), set()
    for slots, vals in constraint.groups:
        if len(slots) != len(vals):
            raise BracketLabError(f"seed group {slots} has {len(vals)} strengths")
        groups.append(([index[s] for s in slots], sorted(vals)))
        seen_slots.update(slots)
        seen_vals.update(vals)
    if seen_slots != set(labels) or seen_vals != set(range(1, n + 1)):
        raise BracketLabError("seed groups must partition slots and strengths 1..n")
    return groups


def _pack(groups):
    gslots = np.array([s for g in groups for s in g[0]], dtype=np.int32)
    gvals = np.array([v for g in groups for v in g[1]], dtype=np.int32)
    bounds = np.cumsum([0] + [len(g[0]) for g in groups]).astype(np.int32)
    return gslots, gvals, bounds


def _chunks(groups):
    """Split on the value at the first slot; chunks stay lexicographically contiguous."""
    slots0, vals0 = groups[0]
    if len(slots0) < 2:
        return [groups]
    out = []
    for v in vals0:
        rest = [x for x in vals0 if x != v]
        out.append([([slots0[0]], [v]), (slots0[1:], rest)] + groups[1:])
    return out


def compile_bracket(g: BracketGraph):
    """Flatten a graph into source/placement arrays in round order.

    Sources index a value buffer: entry slot k is ``k``; the winner of the
    j-th ordered match is ``n + 2j`` and its loser ``n + 2j + 1``.
    """
    order = g.ordered_matches()
    pos = {m.id: j for j, m in enumerate(order)}
    slot_ix = {s: k for k, s in enumerate(g.entry_slots)}
    col = {c.label: k for k, c in enumerate(g.placement_classes)}
    n = g.n
    src = np.zeros((len(order), 2), dtype=np.int32)
    wp = np.full(len(order), -1, dtype=np.int32)
    lp = np.full(len(order), -1, dtype=np.int32)
    for j, m in enumerate(order):
        for k, s in enumerate(m.sources):
            if s.slot is not None:
                src[j, k] = slot_ix[s.slot]
            else:
                src[j, k] = n + 2 * pos[s.match] + (s.feed == "loss")
        if m.win_dest.is_placement:
            wp[j] = col[m.win_dest.placement]
        if m.loss_dest.is_placement:
            lp[j] = col[m.loss_dest.placement]
    return src, wp, lp


def _run_chunk(args):
    kind, backend, payload, groups = args
    impl = kernels.backends()[backend]
    packed = _pack(groups)
    if kind == "bracket":
        n, src, wp, lp, k = payload
        return impl.bracket_tally(n, src, wp, lp, k, *packed)
    n, pairs = payload
    return impl.rr_tally(n, pairs, *packed)


def enumerate_all(fmt: Format, constraint: Seeded | None = None, jobs: int = 1,
                  backend: str | None = None) -> RankTally:
    """Tally placements over every admissible strength assignment."""
    rep = validate(fmt)
    if not rep.ok:
        raise InvalidFormatError(rep)
    groups = _groups(fmt, constraint)
    total = reduce(lambda acc, g: acc * math.factorial(len(g[0])), groups, 1)
    if total > MAX_ASSIGNMENTS:
        raise EnumerationBoundError(
            f"{total} assignments exceed the exhaustive bound of {MAX_ASSIGNMENTS}; "
            "use at most 10 participants or seed the brackets")
    backend = backend or kernels.BACKEND
    n = _n(fmt)
    if isinstance(fmt, RoundSchedule):
        kind, payload = "rr", (n, np.array(fmt.pairs(), dtype=np.int32).reshape(-1, 2))
    else:
        src, wp, lp = compile_bracket(fmt)
        kind, payload = "bracket", (n, src, wp, lp, len(fmt.placement_classes))

    tasks = [(kind, backend, payload, g) for g in (_chunks(groups) if jobs > 1 else [groups])]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    raw = sum(parts[1:], parts[0])

    if kind == "bracket":
        return RankTally(fmt.placement_classes, raw, total)
    # collapse (strength, lo, hi) into the classes that actually occur
    spans = {PlacementClass(r + 1, r + 1) for r in range(n)}
    lo_hi = np.argwhere(raw.sum(axis=0) > 0)
    spans.update(PlacementClass(int(lo) + 1, int(hi) + 1) for lo, hi in lo_hi)
    classes = tuple(sorted(spans))
    counts = np.zeros((n, len(classes)), dtype=np.int64)
    for k, c in enumerate(classes):
        counts[:, k] = raw[:, c.rank_lo - 1, c.rank_hi - 1]
    return RankTally(classes, counts, total)


@dataclass
class PrecisionReport:
    precise: tuple[str, ...]
    top: int
    verdict: str
    expected: dict[int, str] = field(default_factory=dict)


def expected_ranking(tally: RankTally) -> dict[int, str]:
    """Strength ``s`` deserves rank ``n - s + 1``; map it to the narrowest class holding that rank."""
    n = tally.n
    out = {}
    for s in range(1, n + 1):
        r = n - s + 1
        holding = [c for c in tally.classes if c.rank_lo <= r <= c.rank_hi]
        out[s] = min(holding, key=lambda c: c.capacity).label
    return out


def precision_report(tally: RankTally, expected: dict[int, str] | None = None) -> PrecisionReport:
    if expected is None:
        expected = expected_ranking(tally)
    if set(expected) != set(range(1, tally.n + 1)) or not set(expected.values()) <= set(tally.labels):
        raise BracketLabError("expected ranking does not match the tally's strengths and classes")
    precise = []
    for c in tally.classes:
        who = [s for s, lab in expected.items() if lab == c.label]
        if who and all(tally.count(s, c.label) == tally.total for s in who):
            precise.append(c.label)
    top = 0
    for c in sorted(tally.classes):
        if c.rank_lo != top + 1:
            continue
        if c.label not in precise:
            break
        top = c.rank_hi
    n = tally.n
    if top == n:
        verdict = "All"
    elif top == 0:
        verdict = "None"
    elif top == 1:
        verdict = "Top 1 winner only"
    else:
        verdict = f"Top {top} winners"
    return PrecisionReport(tuple(precise), top, verdict, dict(expected))
