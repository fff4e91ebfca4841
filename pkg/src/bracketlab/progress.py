"""Progress trees, stability values, and competitiveness checks.

A progress tree follows one participant through the event: each internal
node is a pending match with a win branch and a loss branch, each leaf a
final placement.  A leaf is worth its prize; an internal node is worth the
mean of its two children.

Round-robin trees are built from an exhaustive enumeration of the
remaining results, so a leaf can be *unknown* when the participant's own
record does not fix its placement.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from . import kernels
from .bracket import BracketGraph, BracketLabError, InvalidFormatError, PlacementClass, PrizeVector, RoundSchedule, validate
from .precision import EnumerationBoundError

MAX_REMAINING = 20


class IndeterminateError(BracketLabError):
    """Raised when stability values are needed but some leaves are unknown."""

    def __init__(self, unknown: list[str]):
        self.unknown = unknown
        super().__init__("indeterminate: unknown leaves at " + ", ".join(unknown))


@dataclass(frozen=True, eq=False)
class ProgressNode:
    match: str | None
    placement: PlacementClass | None
    win: "ProgressNode | None"
    loss: "ProgressNode | None"
    stability: float | None
    reachable: tuple[PlacementClass, ...]
    path: str = ""

    @property
    def is_leaf(self) -> bool:
        return self.win is None

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.reachable)

    def internal_nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                yield node
                stack += [node.loss, node.win]

    def leaves(self):
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                yield node
            else:
                stack += [node.loss, node.win]

    def to_dict(self) -> dict:
        out = {"path": self.path, "stability": self.stability, "reachable": list(self.labels)}
        if self.is_leaf:
            out["placement"] = self.placement.label if self.placement else None
        else:
            out["match"] = self.match
            out["win"] = self.win.to_dict()
            out["loss"] = self.loss.to_dict()
        return out


@dataclass(frozen=True)
class ProgressTree:
    participant: str
    root: ProgressNode
    tolerance: float = 0.0

    def render(self) -> str:
        lines = [self.participant]

        def walk(node, prefix, indent):
            val = "?" if node.stability is None else f"{node.stability:g}"
            if node.is_leaf:
                what = node.placement.label if node.placement else "{" + ", ".join(node.labels) + "}"
                lines.append(f"{indent}{prefix}{what}  x={val}")
            else:
                lines.append(f"{indent}{prefix}{node.match}  v={val}")
                walk(node.win, "W: ", indent + "  ")
                walk(node.loss, "L: ", indent + "  ")

        walk(self.root, "", "  ")
        return "\n".join(lines)


@dataclass(frozen=True)
class Finding:
    participant: str
    match: str | None
    kind: str  # stability | possibility | throwaway
    detail: str
    severity: str = "violation"  # violation | inversion | equality

    def to_dict(self) -> dict:
        return {"participant": self.participant, "match": self.match, "kind": self.kind,
                "severity": self.severity, "detail": self.detail}


def _leaf(cls: PlacementClass, value: float, path: str) -> ProgressNode:
    return ProgressNode(None, cls, None, None, value, (cls,), path)


def _internal(match: str, win: ProgressNode, loss: ProgressNode, path: str) -> ProgressNode:
    if win.stability is None or loss.stability is None:
        value = None
    else:
        value = (win.stability + loss.stability) / 2
    reach = tuple(sorted(set(win.reachable) | set(loss.reachable)))
    return ProgressNode(match, None, win, loss, value, reach, path)


def _tolerance(prizes: PrizeVector) -> float:
    # scale-relative so that affine prize changes keep every comparison
    return 1e-9 * prizes.spread


def build_tree(graph: BracketGraph, entry: str, prizes: PrizeVector) -> ProgressTree:
    """Progress tree for the participant who starts in ``entry``."""
    rep = validate(graph)
    if not rep.ok:
        raise InvalidFormatError(rep)
    if len(prizes) != len(graph.placement_classes):
        raise BracketLabError(
            f"{len(prizes)} prizes for {len(graph.placement_classes)} placement classes")
    ordered = sorted(graph.placement_classes)
    value = {c.label: prizes[k] for k, c in enumerate(ordered)}

    def grow(dest, path):
        if dest.is_placement:
            cls = graph.placement(dest.placement)
            return _leaf(cls, value[cls.label], path)
        m = graph.match(dest.match)
        return _internal(m.id, grow(m.win_dest, path + "W"), grow(m.loss_dest, path + "L"), path)

    first = graph.entry_match(entry)
    root = _internal(first.id, grow(first.win_dest, "W"), grow(first.loss_dest, "L"), "")
    return ProgressTree(entry, root, _tolerance(prizes))


def _unwrap(tree):
    if isinstance(tree, ProgressTree):
        return tree.participant, tree.root, tree.tolerance
    return "", tree, 0.0


def check_stability_progressing(tree, strict: bool = True) -> list[Finding]:
    """Nodes whose win branch is not worth strictly more than the loss branch.

    With ``strict`` an unknown child stability raises :class:`IndeterminateError`;
    otherwise such nodes are skipped.
    """
    who, root, tol = _unwrap(tree)
    if strict:
        unknown = [leaf.path or "root" for leaf in root.leaves() if leaf.stability is None]
        if unknown:
            raise IndeterminateError(unknown)
    out = []
    for node in root.internal_nodes():
        w, l = node.win.stability, node.loss.stability
        if w is None or l is None:
            continue
        diff = w - l
        if diff > tol:
            continue
        if abs(diff) <= tol:
            out.append(Finding(who, node.match, "stability",
                               f"win and loss both worth {w:g} at {node.path or 'root'}", "equality"))
        else:
            out.append(Finding(who, node.match, "stability",
                               f"loss worth {l:g} beats win worth {w:g} at {node.path or 'root'}", "inversion"))
    return out


def check_possibility_of_results(tree) -> list[Finding]:
    """Edges into a still-active state must only shed the lowest classes."""
    who, root, _ = _unwrap(tree)
    out = []
    for node in root.internal_nodes():
        for tag, child in (("win", node.win), ("loss", node.loss)):
            if child.is_leaf:
                continue
            keep = child.reachable
            if keep != node.reachable[:len(keep)]:
                lost = [c.label for c in node.reachable if c not in keep]
                out.append(Finding(who, node.match, "possibility",
                                   f"{tag} at {node.path or 'root'} loses {', '.join(lost)} "
                                   f"while {', '.join(c.label for c in keep)} remain"))
    return out


def detect_throwaway(tree) -> list[Finding]:
    """Matches whose outcomes are indistinguishable in value and reachable placements."""
    who, root, tol = _unwrap(tree)
    out = []
    for node in root.internal_nodes():
        w, l = node.win.stability, node.loss.stability
        if w is None or l is None:
            continue
        if abs(w - l) <= tol and node.win.reachable == node.loss.reachable:
            out.append(Finding(who, node.match, "throwaway",
                               f"win and loss both lead to {{{', '.join(node.win.labels)}}} "
                               f"worth {w:g} at {node.path or 'root'}"))
    return out


def analyze_bracket(graph: BracketGraph, prizes: PrizeVector) -> tuple[list[ProgressTree], list[Finding]]:
    """Trees for every entry slot plus all competitiveness findings."""
    trees = [build_tree(graph, s, prizes) for s in graph.entry_slots]
    findings = []
    for t in trees:
        findings += check_stability_progressing(t)
        findings += check_possibility_of_results(t)
        findings += detect_throwaway(t)
    return trees, findings


# -- round-robin ------------------------------------------------------------


@dataclass(frozen=True)
class Standings:
    names: tuple[str, ...]
    wins: tuple[int, ...]
    losses: tuple[int, ...]
    played: tuple[tuple[str, str], ...]  # (winner, loser)
    remaining: tuple[tuple[tuple[str, str], ...], ...]
    first_round: int | None = None

    def index(self, name: str) -> int:
        return self.names.index(name)

    @property
    def next_round(self) -> int:
        if self.first_round is not None:
            return self.first_round
        return max((w + l for w, l in zip(self.wins, self.losses)), default=0) + 1

    @classmethod
    def from_results(cls, names, played, remaining, first_round=None) -> "Standings":
        names = tuple(names)
        wins = [0] * len(names)
        losses = [0] * len(names)
        for w, l in played:
            wins[names.index(w)] += 1
            losses[names.index(l)] += 1
        return cls(names, tuple(wins), tuple(losses), tuple(tuple(p) for p in played),
                   tuple(tuple(tuple(p) for p in rnd) for rnd in remaining), first_round)

    def problems(self, full_schedule: bool = True) -> list[str]:
        """Consistency problems; ``full_schedule`` also demands every pair exactly once."""
        out = []
        known = set(self.names)
        for w, l in self.played:
            if w not in known or l not in known or w == l:
                out.append(f"bad played result {w}>{l}")
        for rnd in self.remaining:
            seen = set()
            for a, b in rnd:
                if a not in known or b not in known or a == b:
                    out.append(f"bad remaining pair {a}-{b}")
                for p in (a, b):
                    if p in seen:
                        out.append(f"{p} plays twice in one remaining round")
                    seen.add(p)
        if out:
            return out
        for k, name in enumerate(self.names):
            w = sum(1 for x, _ in self.played if x == name)
            l = sum(1 for _, y in self.played if y == name)
            if (w, l) != (self.wins[k], self.losses[k]):
                out.append(f"{name} record {self.wins[k]}-{self.losses[k]} disagrees with played results {w}-{l}")
        if full_schedule:
            pairs = [frozenset(p) for p in self.played] + [frozenset(p) for rnd in self.remaining for p in rnd]
            if len(set(pairs)) != len(pairs):
                out.append("a pairing is scheduled more than once")
            n = len(self.names)
            if len(set(pairs)) != n * (n - 1) // 2:
                out.append("played and remaining do not cover every pairing")
        return out

    def to_dict(self) -> dict:
        doc = {
            "participants": {n: {"wins": w, "losses": l} for n, w, l in zip(self.names, self.wins, self.losses)},
            "played": [list(p) for p in self.played],
            "remaining": [[list(p) for p in rnd] for rnd in self.remaining],
        }
        if self.first_round is not None:
            doc["first_round"] = self.first_round
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Standings":
        try:
            parts = doc["participants"]
            names = tuple(parts)
            return cls(
                names,
                tuple(int(parts[n]["wins"]) for n in names),
                tuple(int(parts[n]["losses"]) for n in names),
                tuple((str(w), str(l)) for w, l in doc.get("played", [])),
                tuple(tuple((str(a), str(b)) for a, b in rnd) for rnd in doc.get("remaining", [])),
                doc.get("first_round"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise BracketLabError(f"malformed standings document: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "Standings":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def standings_after(schedule: RoundSchedule, rounds: int, strengths=None, names=None) -> Standings:
    """Play the first ``rounds`` rounds of ``schedule`` with the stronger side winning."""
    n = schedule.n
    strengths = list(strengths or range(1, n + 1))
    names = list(names or [f"P{k}" for k in range(1, n + 1)])
    played = []
    for rnd in schedule.rounds[:rounds]:
        for a, b in rnd:
            w, l = (a, b) if strengths[a] > strengths[b] else (b, a)
            played.append((names[w], names[l]))
    remaining = [[(names[a], names[b]) for a, b in rnd] for rnd in schedule.rounds[rounds:]]
    return Standings.from_results(names, played, remaining, first_round=rounds + 1)


@dataclass(frozen=True)
class ConditionalThrowaway:
    """A remaining match whose result cannot change a participant's placement.

    ``holds`` of ``of`` completions of the earlier rounds make it so;
    ``whenever`` lists the participant's own earlier results that suffice
    on their own (an empty tuple means unconditionally).
    """

    participant: str
    opponent: str
    round: int
    holds: int
    of: int
    whenever: tuple[tuple[tuple[str, int, str], ...], ...]

    @property
    def match(self) -> str:
        return f"{self.participant} v {self.opponent} (round {self.round})"

    def to_dict(self) -> dict:
        return {"participant": self.participant, "opponent": self.opponent, "round": self.round,
                "holds": self.holds, "of": self.of,
                "whenever": [[{"opponent": o, "round": r, "result": res} for o, r, res in cond]
                             for cond in self.whenever]}


@dataclass
class ParticipantProgress:
    name: str
    wins: int
    losses: int
    remaining: int
    reachable: tuple[str, ...]
    stability: float | None
    tree: ProgressTree
    findings: list[Finding] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"participant": self.name, "wins": self.wins, "losses": self.losses,
                "remaining": self.remaining, "reachable": list(self.reachable),
                "stability": self.stability if self.stability is not None else "unknown",
                "violations": [f.to_dict() for f in self.findings]}


@dataclass
class RRReport:
    participants: list[ParticipantProgress]
    throwaways: list[ConditionalThrowaway]

    @property
    def findings(self) -> list[Finding]:
        return [f for p in self.participants for f in p.findings]

    def participant(self, name: str) -> ParticipantProgress:
        return next(p for p in self.participants if p.name == name)

    def to_dict(self) -> dict:
        return {"participants": [p.to_dict() for p in self.participants],
                "throwaways": [t.to_dict() for t in self.throwaways],
                "violations": [f.to_dict() for f in self.findings]}


def class_prize(prizes: PrizeVector, cls: PlacementClass) -> float:
    """A shared class is worth the mean of the per-rank prizes it spans."""
    return sum(prizes[r - 1] for r in cls.ranks) / cls.capacity


def rr_progress(standings: Standings, prizes: PrizeVector, backend: str | None = None) -> RRReport:
    """Enumerate every completion of the remaining matches and report per participant.

    ``prizes`` holds one value per rank 1..n.  Bit ``j`` of a completion index
    set means the first-listed side of remaining match ``j`` wins.
    """
    names = standings.names
    n = len(names)
    if len(prizes) != n:
        raise BracketLabError(f"round-robin needs one prize per rank: {n} values, got {len(prizes)}")
    bad = standings.problems(full_schedule=False)
    if bad:
        raise BracketLabError("inconsistent standings: " + "; ".join(bad))
    rem = []
    for r, rnd in enumerate(standings.remaining, standings.next_round):
        for a, b in rnd:
            rem.append((names.index(a), names.index(b), r))
    m = len(rem)
    if m > MAX_REMAINING:
        raise EnumerationBoundError(f"{m} remaining matches exceed the enumeration bound of {MAX_REMAINING}")
    impl = kernels.backends()[backend] if backend else kernels
    pairs = np.array([(a, b) for a, b, _ in rem], dtype=np.int32).reshape(-1, 2)
    codes = impl.rr_completion_classes(n, np.array(standings.wins, dtype=np.int32), pairs)
    codes = np.asarray(codes).astype(np.int64)
    idx = np.arange(1 << m, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(m)) & 1 if m else np.zeros((1, 0), dtype=np.int64)

    classes: dict[int, PlacementClass] = {}

    def decode(code: int) -> PlacementClass:
        if code not in classes:
            classes[code] = PlacementClass(code // n + 1, code % n + 1)
        return classes[code]

    tol = _tolerance(prizes)
    report_rows, throwaways = [], []
    for p, name in enumerate(names):
        own = [j for j, (a, b, _) in enumerate(rem) if p in (a, b)]
        # own_won[c, d]: did p win its d-th remaining match in completion c
        own_won = np.stack([bits[:, j] == (1 if rem[j][0] == p else 0) for j in own], axis=1) \
            if own else np.zeros((1 << m, 0), dtype=bool)
        key = (own_won.astype(np.int64) << np.arange(len(own))).sum(axis=1) if own else np.zeros(1 << m, dtype=np.int64)
        leaf_sets: dict[int, set[int]] = {}
        for k, code in np.unique(np.stack([key, codes[:, p]], axis=1), axis=0):
            leaf_sets.setdefault(int(k), set()).add(int(code))

        def grow(depth, k, path):
            if depth == len(own):
                cs = sorted(decode(c) for c in leaf_sets[k])
                if len(cs) == 1:
                    return _leaf(cs[0], class_prize(prizes, cs[0]), path)
                return ProgressNode(None, None, None, None, None, tuple(cs), path)
            a, b, r = rem[own[depth]]
            opp = names[b if a == p else a]
            return _internal(f"{name} v {opp} (round {r})",
                             grow(depth + 1, k | (1 << depth), path + "W"),
                             grow(depth + 1, k, path + "L"), path)

        tree = ProgressTree(name, grow(0, 0, ""), tol)
        reach = tree.root.reachable
        row = ParticipantProgress(name, standings.wins[p], standings.losses[p], len(own),
                                  tuple(c.label for c in reach), tree.root.stability, tree)

        if own:
            covered = set()
            for c in reach:
                covered.update(c.ranks)
            if covered != set(range(1, max(covered) + 1)):
                lost = sorted(set(range(1, max(covered) + 1)) - covered)
                what = "1st place is out of reach" if 1 in lost else \
                    "ranks " + ", ".join(map(str, lost)) + " lost while lower ones remain"
                row.findings.append(Finding(name, None, "possibility",
                                            f"{what} with {len(own)} match(es) still to play"))

        mine = []
        for d, j in enumerate(own):
            a, b, r = rem[j]
            earlier = [i for i, x in enumerate(rem) if x[2] < r]
            emask = sum(1 << i for i in earlier)
            same = codes[:, p] == codes[idx ^ (1 << j), p]
            bad_keys = np.unique(idx[~same] & emask)
            total = 1 << len(earlier)
            holds = total - len(bad_keys)
            if not holds:
                continue
            own_before = [(i, jj) for i, jj in enumerate(own) if rem[jj][2] < r]

            def pattern(ekey):
                return tuple(((ekey >> jj) & 1) == (1 if rem[jj][0] == p else 0) for _, jj in own_before)

            bad_patterns = {pattern(int(k)) for k in bad_keys}
            whenever = []
            for pat in product((True, False), repeat=len(own_before)):
                if pat not in bad_patterns:
                    whenever.append(tuple(
                        (names[rem[jj][1] if rem[jj][0] == p else rem[jj][0]], rem[jj][2], "W" if won else "L")
                        for (_, jj), won in zip(own_before, pat)))
            opp = names[b if a == p else a]
            ct = ConditionalThrowaway(name, opp, r, holds, total, tuple(whenever))
            throwaways.append(ct)
            mine.append(ct.match)
            if whenever == [()]:
                cond = "regardless of earlier results"
            elif whenever:
                cond = "whenever " + " or ".join(
                    " and ".join(f"{name} {'beats' if res == 'W' else 'loses to'} {o} in round {rr}"
                              for o, rr, res in w) for w in whenever)
            else:
                cond = f"in {holds} of {total} completions of earlier rounds"
            row.findings.append(Finding(
                name, ct.match, "throwaway",
                f"placement is fixed whichever way the match goes {cond}; "
                "the win is worth no more than the loss, so stability progressing fails here"))

        for f in check_stability_progressing(tree, strict=False):
            if f.severity == "equality" and f.match in mine:
                continue
            row.findings.append(f)
        for f in detect_throwaway(tree):
            if f.match not in mine:
                row.findings.append(f)
        report_rows.append(row)
    return RRReport(report_rows, throwaways)
