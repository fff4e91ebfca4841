"""Builders for single elimination, the 4+4 double elimination, and round-robin."""
from __future__ import annotations

from .bracket import BracketGraph, BracketLabError, Dest, MatchNode, PlacementClass, RoundSchedule, Slot

SE_MAX_ROUNDS = 6
DE_ROUNDS = (2, 3, 4, 5, 6)
RR_MAX = 12


def _win(mid):
    return Slot(match=mid, feed="win")


def _loss(mid):
    return Slot(match=mid, feed="loss")


def _assemble(specs, classes) -> tuple[MatchNode, ...]:
    """Fill in destinations from the source lists of ``specs``.

    ``specs`` is a list of ``(id, (src_a, src_b), round)``; ``classes`` maps
    ``(match id, outcome)`` to the placement label for outcomes that end
    the participant's run.
    """
    dest = {}
    for mid, srcs, _ in specs:
        for s in srcs:
            if s.match is not None:
                dest[(s.match, s.feed)] = Dest(match=mid, feed=s.feed)
    for key, label in classes.items():
        dest[key] = Dest(placement=label)
    return tuple(
        MatchNode(mid, tuple(srcs), dest[(mid, "win")], dest[(mid, "loss")], rnd)
        for mid, srcs, rnd in specs
    )


def gen_single_elim(i: int) -> BracketGraph:
    """Single elimination over ``2**i`` slots, adjacent slots paired in round 1."""
    if not 1 <= i <= SE_MAX_ROUNDS:
        raise BracketLabError(f"single elimination supports 1..{SE_MAX_ROUNDS} rounds, got {i}")
    n = 2 ** i
    slots = tuple(f"S{k}" for k in range(1, n + 1))
    specs, classes = [], {}
    prev = [Slot(slot=s) for s in slots]
    placements = [PlacementClass(1, 1)]
    for r in range(1, i + 1):
        lo, hi = 2 ** (i - r) + 1, 2 ** (i - r + 1)
        cls = PlacementClass(lo, hi)
        placements.append(cls)
        nxt = []
        for k in range(len(prev) // 2):
            mid = f"R{r}M{k + 1}"
            specs.append((mid, (prev[2 * k], prev[2 * k + 1]), r))
            classes[(mid, "loss")] = cls.label
            nxt.append(_win(mid))
        prev = nxt
    classes[(specs[-1][0], "win")] = placements[0].label
    return BracketGraph(slots, _assemble(specs, classes), tuple(sorted(placements)))


def gen_double_elim(i: int = 3) -> BracketGraph:
    """Double elimination with ``2**(i-1)`` upper and ``2**(i-1)`` lower entrants.

    Upper losers drop straight across: the loser of the j-th upper match in
    a round meets the j-th lower survivor.  Lower rounds run two per upper
    round, so upper round k is global round ``2k - 1``.
    """
    if i not in DE_ROUNDS:
        raise BracketLabError(f"double elimination supports i in {DE_ROUNDS}, got {i}")
    half = 2 ** (i - 1)
    n = 2 * half
    uslots = [f"U{k}" for k in range(1, half + 1)]
    lslots = [f"L{k}" for k in range(1, half + 1)]
    specs, classes = [], {}
    counter = {"u": 0, "l": 0}

    def new(kind, srcs, rnd):
        counter[kind] += 1
        mid = f"M{kind}{counter[kind]}"
        specs.append((mid, srcs, rnd))
        return mid

    # placements are assigned bottom-up as lower rounds eliminate players
    taken = n
    placements = []

    def eliminate(mids):
        nonlocal taken
        cls = PlacementClass(taken - len(mids) + 1, taken)
        taken -= len(mids)
        placements.append(cls)
        for mid in mids:
            classes[(mid, "loss")] = cls.label

    upper = [Slot(slot=s) for s in uslots]
    lower = [Slot(slot=s) for s in lslots]
    upper_rounds = []  # match ids per upper round
    # round 1: upper and lower openers
    ids = [new("u", (upper[2 * k], upper[2 * k + 1]), 1) for k in range(half // 2)]
    upper_rounds.append(ids)
    upper = [_win(m) for m in ids]
    lids = [new("l", (lower[2 * k], lower[2 * k + 1]), 1) for k in range(half // 2)]
    eliminate(lids)
    lower = [_win(m) for m in lids]

    for k in range(1, i):
        # drop-in round against the losers of upper round k
        drops = [_loss(m) for m in upper_rounds[k - 1]]
        lids = [new("l", (lower[j], drops[j]), 2 * k) for j in range(len(drops))]
        eliminate(lids)
        lower = [_win(m) for m in lids]
        if k < i - 1:
            ids = [new("u", (upper[2 * j], upper[2 * j + 1]), 2 * k + 1) for j in range(len(upper) // 2)]
            upper_rounds.append(ids)
            upper = [_win(m) for m in ids]
            lids = [new("l", (lower[2 * j], lower[2 * j + 1]), 2 * k + 1) for j in range(len(lower) // 2)]
            eliminate(lids)
            lower = [_win(m) for m in lids]

    assert len(upper) == 1 and len(lower) == 1
    specs.append(("Mg", (upper[0], lower[0]), 2 * i - 1))
    second, first = PlacementClass(2, 2), PlacementClass(1, 1)
    classes[("Mg", "loss")] = second.label
    classes[("Mg", "win")] = first.label
    placements += [second, first]
    placements.reverse()
    order = {mid: pos for pos, (mid, _, _) in enumerate(specs)}
    specs.sort(key=lambda s: (s[2], s[0][1] == "l", order[s[0]]))
    slots = tuple(uslots + lslots)
    return BracketGraph(slots, _assemble(specs, classes), tuple(placements))


def gen_round_robin(n: int) -> RoundSchedule:
    """Circle-method schedule: participant 0 stays fixed, the rest rotate."""
    if n % 2 or not 2 <= n <= RR_MAX:
        raise BracketLabError(f"round-robin supports even n in 2..{RR_MAX}, got {n}")
    ring = list(range(n))
    rounds = []
    for _ in range(n - 1):
        rnd = tuple(tuple(sorted((ring[k], ring[n - 1 - k]))) for k in range(n // 2))
        rounds.append(rnd)
        ring = [ring[0], ring[-1]] + ring[1:-1]
    return RoundSchedule(n, tuple(rounds))


def generate(fmt: str, participants: int):
    """Dispatch on the CLI format selector."""
    if fmt == "se":
        i = participants.bit_length() - 1
        if participants < 2 or 2 ** i != participants:
            raise BracketLabError(f"single elimination needs a power of two, got {participants}")
        return gen_single_elim(i)
    if fmt in ("de", "de-seeded"):
        i = participants.bit_length() - 1
        if participants < 4 or 2 ** i != participants:
            raise BracketLabError(f"double elimination needs a power of two >= 4, got {participants}")
        return gen_double_elim(i)
    if fmt == "rr":
        return gen_round_robin(participants)
    raise BracketLabError(f"unknown format {fmt!r}")
