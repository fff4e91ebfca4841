import itertools

import pytest

from bracketlab import kernels
from bracketlab.generators import gen_round_robin
from bracketlab.progress import Standings

MIDSEASON = {"A": 5, "K": 3, "B": 2, "F": 2, "E": 2, "G": 2, "R": 2, "P": 2}


@pytest.fixture(params=sorted(kernels.backends()))
def backend(request):
    return request.param


def orient(pairs, wins):
    """Backtracking: pick a winner for every pair so each name reaches its win count."""
    left = dict(wins)
    todo = {name: sum(1 for p in pairs if name in p) for name in wins}
    out = []

    def bt(i):
        if i == len(pairs):
            return all(v == 0 for v in left.values())
        a, b = pairs[i]
        todo[a] -= 1
        todo[b] -= 1
        for w, l in ((a, b), (b, a)):
            if left[w] > 0:
                left[w] -= 1
                # every name must still be able to collect its wins
                if left[w] <= todo[w] and left[l] <= todo[l]:
                    out.append((w, l))
                    if bt(i + 1):
                        return True
                    out.pop()
                left[w] += 1
        todo[a] += 1
        todo[b] += 1
        return False

    return list(out) if bt(0) else None


def midseason_schedules():
    """Every distinct rounds-6/7 fixture list left by 5 circle-method rounds,
    together with results for rounds 1-5 that give the MIDSEASON records."""
    sched = gen_round_robin(8)
    names = list(MIDSEASON)
    seen = set()
    for perm in itertools.permutations(names):
        key = tuple(frozenset(frozenset((perm[a], perm[b])) for a, b in rnd) for rnd in sched.rounds[5:])
        if key in seen:
            continue
        seen.add(key)
        played = [(perm[a], perm[b]) for rnd in sched.rounds[:5] for a, b in rnd]
        res = orient(played, MIDSEASON)
        if res is None:
            continue
        remaining = [[(perm[a], perm[b]) for a, b in rnd] for rnd in sched.rounds[5:]]
        yield Standings.from_results(names, res, remaining, first_round=6)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
