"""Match-graph data model for elimination brackets and round-robin schedules.

A :class:`BracketGraph` is destination-coded: every match names where its
winner and its loser go next, either into a later match or straight into a
placement class.  The same structure therefore carries single elimination,
double elimination, and any user-supplied bracket file.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Union


class BracketLabError(ValueError):
    """Base class for user-facing errors."""


class InvalidFormatError(BracketLabError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("invalid format: " + "; ".join(str(v) for v in report.violations))


def ordinal(k: int) -> str:
    if 10 <= k % 100 <= 20:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(k % 10, "th")
    return f"{k}{suffix}"


def span_label(lo: int, hi: int) -> str:
    """``span_label(3, 4) == "3-4th"``; single ranks use plain ordinals."""
    if lo == hi:
        return ordinal(lo)
    return f"{lo}-{ordinal(hi)}"


@dataclass(frozen=True, order=True)
class PlacementClass:
    rank_lo: int
    rank_hi: int
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.rank_lo < 1 or self.rank_hi < self.rank_lo:
            raise BracketLabError(f"bad rank span {self.rank_lo}..{self.rank_hi}")
        if not self.label:
            object.__setattr__(self, "label", span_label(self.rank_lo, self.rank_hi))

    @property
    def capacity(self) -> int:
        return self.rank_hi - self.rank_lo + 1

    @property
    def ranks(self) -> range:
        return range(self.rank_lo, self.rank_hi + 1)

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class PrizeVector:
    """Prize per placement class, best class first."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise BracketLabError("empty prize vector")
        for a, b in zip(vals, vals[1:]):
            if b > a:
                raise BracketLabError(f"prizes must be nonincreasing, got {list(vals)}")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def spread(self) -> float:
        return self.values[0] - self.values[-1]

    def affine(self, a: float, b: float) -> "PrizeVector":
        return PrizeVector(tuple(a * v + b for v in self.values))

    @classmethod
    def positional(cls, classes: Iterable[PlacementClass]) -> "PrizeVector":
        """Default prizes: rank r of n is worth n - r + 1, averaged over each class span."""
        classes = list(classes)
        n = max(c.rank_hi for c in classes)
        return cls(tuple(sum(n - r + 1 for r in c.ranks) / c.capacity for c in classes))


@dataclass(frozen=True)
class Slot:
    """An entry slot (``slot``) or the winner/loser of an earlier match."""

    slot: str | None = None
    match: str | None = None
    feed: str | None = None

    def __post_init__(self):
        if (self.slot is None) == (self.match is None):
            raise BracketLabError("source must name exactly one of slot or match")
        if self.match is not None and self.feed not in ("win", "loss"):
            raise BracketLabError(f"feed must be 'win' or 'loss', got {self.feed!r}")

    def to_dict(self) -> dict:
        if self.slot is not None:
            return {"slot": self.slot}
        return {"match": self.match, "feed": self.feed}

    def __str__(self):
        return self.slot if self.slot is not None else f"{self.feed}({self.match})"


@dataclass(frozen=True)
class Dest:
    """Where a match outcome sends its participant: a later match or a placement."""

    match: str | None = None
    feed: str | None = None
    placement: str | None = None

    def __post_init__(self):
        if (self.match is None) == (self.placement is None):
            raise BracketLabError("destination must name exactly one of match or placement")

    @property
    def is_placement(self) -> bool:
        return self.placement is not None

    def to_dict(self) -> dict:
        if self.placement is not None:
            return {"placement": self.placement}
        return {"match": self.match, "feed": self.feed}

    def __str__(self):
        return self.placement if self.placement is not None else self.match


@dataclass(frozen=True)
class MatchNode:
    id: str
    sources: tuple[Slot, Slot]
    win_dest: Dest
    loss_dest: Dest
    round: int

    def dest(self, outcome: str) -> Dest:
        return self.win_dest if outcome == "win" else self.loss_dest


@dataclass(frozen=True)
class BracketGraph:
    entry_slots: tuple[str, ...]
    matches: tuple[MatchNode, ...]
    placement_classes: tuple[PlacementClass, ...]

    @property
    def n(self) -> int:
        return len(self.entry_slots)

    @property
    def n_rounds(self) -> int:
        return max((m.round for m in self.matches), default=0)

    def match(self, match_id: str) -> MatchNode:
        return self._by_id()[match_id]

    def placement(self, label: str) -> PlacementClass:
        for c in self.placement_classes:
            if c.label == label:
                return c
        raise KeyError(label)

    def _by_id(self) -> dict[str, MatchNode]:
        return {m.id: m for m in self.matches}

    def ordered_matches(self) -> list[MatchNode]:
        """Matches sorted by round, stable within a round."""
        return sorted(self.matches, key=lambda m: m.round)

    def entry_match(self, slot: str) -> MatchNode:
        for m in self.matches:
            if any(s.slot == slot for s in m.sources):
                return m
        raise KeyError(slot)

    # -- file format ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "entry_slots": list(self.entry_slots),
            "matches": [
                {
                    "id": m.id,
                    "sources": [s.to_dict() for s in m.sources],
                    "win_dest": m.win_dest.to_dict(),
                    "loss_dest": m.loss_dest.to_dict(),
                    "round": m.round,
                }
                for m in self.matches
            ],
            "placements": [
                {"label": c.label, "rank_lo": c.rank_lo, "rank_hi": c.rank_hi}
                for c in self.placement_classes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BracketGraph":
        try:
            matches = tuple(
                MatchNode(
                    id=str(m["id"]),
                    sources=tuple(Slot(**s) for s in m["sources"]),
                    win_dest=Dest(**m["win_dest"]),
                    loss_dest=Dest(**m["loss_dest"]),
                    round=int(m["round"]),
                )
                for m in data["matches"]
            )
            placements = tuple(
                PlacementClass(int(p["rank_lo"]), int(p["rank_hi"]), p.get("label", ""))
                for p in data["placements"]
            )
            slots = tuple(str(s) for s in data["entry_slots"])
        except (KeyError, TypeError) as exc:
            raise BracketLabError(f"malformed bracket document: {exc!r}") from exc
        return cls(slots, matches, placements)

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "BracketGraph":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class RoundSchedule:
    n: int
    rounds: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)

    def pairs(self) -> list[tuple[int, int]]:
        return [p for rnd in self.rounds for p in rnd]


Format = Union[BracketGraph, RoundSchedule]


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str

    def __str__(self):
        return f"{self.code}: {self.subject}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, subject: str) -> None:
        self.violations.append(Violation(code, subject))

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __bool__(self):
        return self.ok


def validate(fmt: Format) -> ValidationReport:
    if isinstance(fmt, RoundSchedule):
        return _validate_schedule(fmt)
    return _validate_graph(fmt)


def _validate_graph(g: BracketGraph) -> ValidationReport:
    rep = ValidationReport()
    by_id: dict[str, MatchNode] = {}
    for m in g.matches:
        if m.id in by_id:
            rep.add("duplicate match id", m.id)
        by_id[m.id] = m
    labels = {}
    for c in g.placement_classes:
        if c.label in labels:
            rep.add("duplicate placement", c.label)
        labels[c.label] = c

    # placement classes partition 1..n
    n = g.n
    if len(set(g.entry_slots)) != n:
        rep.add("duplicate entry slot", ",".join(g.entry_slots))
    spans = sorted(g.placement_classes)
    expect = 1
    for c in spans:
        if c.rank_lo != expect:
            rep.add("rank partition", f"{c.label} starts at {c.rank_lo}, expected {expect}")
        expect = c.rank_hi + 1
    total = sum(c.capacity for c in g.placement_classes)
    if total != n:
        rep.add("capacity mismatch", f"placement capacities sum to {total}, expected {n}")

    consumed: dict[Slot, list[str]] = {}
    for m in g.matches:
        if len(m.sources) != 2:
            rep.add("source arity", f"{m.id} has {len(m.sources)} sources")
        for s in m.sources:
            consumed.setdefault(s, []).append(m.id)
    for s, users in consumed.items():
        if len(users) > 1:
            rep.add("slot consumed twice", f"{s} feeds {', '.join(users)}")
        if s.slot is not None and s.slot not in g.entry_slots:
            rep.add("unknown slot", f"{s} in {users[0]}")
        if s.match is not None:
            src = by_id.get(s.match)
            if src is None:
                rep.add("unknown match", f"{s.match} referenced by {users[0]}")
                continue
            d = src.dest(s.feed)
            if d.match != users[0]:
                rep.add("dangling feed", f"{s} is consumed by {users[0]} but routed to {d}")
            if src.round >= by_id[users[0]].round:
                rep.add("round order", f"{src.id} (round {src.round}) feeds {users[0]} "
                        f"(round {by_id[users[0]].round})")
    for slot in g.entry_slots:
        if Slot(slot=slot) not in consumed:
            rep.add("slot unused", slot)

    placed: dict[str, int] = {label: 0 for label in labels}
    rank1 = 0
    for m in g.matches:
        if m.round < 1:
            rep.add("round order", f"{m.id} has round {m.round}")
        for outcome in ("win", "loss"):
            d = m.dest(outcome)
            if d.is_placement:
                if d.placement not in labels:
                    rep.add("unknown placement", f"{d.placement} from {m.id}")
                    continue
                placed[d.placement] += 1
                if labels[d.placement].rank_lo == 1:
                    if outcome == "win":
                        rank1 += 1
                    else:
                        rep.add("loser placed first", m.id)
            else:
                target = by_id.get(d.match)
                feed = Slot(match=m.id, feed=outcome)
                if target is None:
                    rep.add("unknown match", f"{d.match} from {m.id}")
                elif feed not in target.sources:
                    rep.add("dangling feed", f"{feed} routed to {d.match}, which does not consume it")
                if d.feed is not None and d.feed != outcome:
                    rep.add("feed mismatch", f"{m.id} {outcome} destination says {d.feed}")
    if rank1 != 1:
        rep.add("champion count", f"{rank1} winner destinations reach the top class")
    for label, cnt in placed.items():
        if cnt != labels[label].capacity:
            rep.add("capacity mismatch", f"{label} receives {cnt} participants, capacity "
                    f"{labels[label].capacity}")

    # matches in one round draw from disjoint participants
    per_round: dict[int, set[Slot]] = {}
    for m in g.matches:
        seen = per_round.setdefault(m.round, set())
        for s in m.sources:
            if s in seen:
                rep.add("round overlap", f"{s} appears twice in round {m.round}")
            seen.add(s)
    return rep


def _validate_schedule(s: RoundSchedule) -> ValidationReport:
    rep = ValidationReport()
    seen: dict[frozenset, int] = {}
    for r, rnd in enumerate(s.rounds, 1):
        used: set[int] = set()
        for a, b in rnd:
            if a == b or not (0 <= a < s.n and 0 <= b < s.n):
                rep.add("bad pair", f"({a}, {b}) in round {r}")
                continue
            for p in (a, b):
                if p in used:
                    rep.add("round overlap", f"participant {p} twice in round {r}")
                used.add(p)
            key = frozenset((a, b))
            if key in seen:
                rep.add("pair repeated", f"({a}, {b}) in rounds {seen[key]} and {r}")
            seen[key] = r
    for a, b in combinations(range(s.n), 2):
        if frozenset((a, b)) not in seen:
            rep.add("pair missing", f"({a}, {b})")
    return rep


def conduction_cost(fmt: Format) -> int:
    """Number of matches the format requires."""
    rep = validate(fmt)
    if not rep.ok:
        raise InvalidFormatError(rep)
    if isinstance(fmt, RoundSchedule):
        return len(fmt.pairs())
    return len(fmt.matches)
