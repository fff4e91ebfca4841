"""Pure-Python versions of the enumeration loops in ``_ckernels.pyx``.

Group arrays describe the admissible strength assignments: group ``g``
places every permutation of ``gvals[gbounds[g]:gbounds[g+1]]`` onto slots
``gslots[gbounds[g]:gbounds[g+1]]``; the product over groups is walked in
lexicographic order with the last group varying fastest.
"""
from itertools import permutations, product

import numpy as np


def _assignments(gslots, gvals, gbounds):
    gslots = [int(x) for x in gslots]
    gvals = [int(x) for x in gvals]
    spans = [(int(gbounds[g]), int(gbounds[g + 1])) for g in range(len(gbounds) - 1)]
    slots = [gslots[a:b] for a, b in spans]
    iters = [permutations(sorted(gvals[a:b])) for a, b in spans]
    for combo in product(*iters):
        yield [(s, v) for grp_slots, grp_vals in zip(slots, combo) for s, v in zip(grp_slots, grp_vals)]


def bracket_tally(n, src, win_place, loss_place, n_classes, gslots, gvals, gbounds):
    src = [(int(a), int(b)) for a, b in src]
    wp = [int(x) for x in win_place]
    lp = [int(x) for x in loss_place]
    counts = [[0] * n_classes for _ in range(n)]
    val = [0] * (n + 2 * len(src))
    for assign in _assignments(gslots, gvals, gbounds):
        for s, v in assign:
            val[s] = v
        for m, (a, b) in enumerate(src):
            x, y = val[a], val[b]
            w, l = (x, y) if x > y else (y, x)
            val[n + 2 * m] = w
            val[n + 2 * m + 1] = l
            if wp[m] >= 0:
                counts[w - 1][wp[m]] += 1
            if lp[m] >= 0:
                counts[l - 1][lp[m]] += 1
    return np.array(counts, dtype=np.int64).reshape(n, n_classes)


def _classes(wins):
    out = []
    for w in wins:
        above = sum(1 for x in wins if x > w)
        tied = sum(1 for x in wins if x == w)
        out.append((above, above + tied - 1))
    return out


def rr_tally(n, pairs, gslots, gvals, gbounds):
    pairs = [(int(a), int(b)) for a, b in pairs]
    counts = np.zeros((n, n, n), dtype=np.int64)
    strength = [0] * n
    for assign in _assignments(gslots, gvals, gbounds):
        for s, v in assign:
            strength[s] = v
        wins = [0] * n
        for a, b in pairs:
            wins[a if strength[a] > strength[b] else b] += 1
        for p, (lo, hi) in enumerate(_classes(wins)):
            counts[strength[p] - 1, lo, hi] += 1
    return counts


def rr_completion_classes(n, base_wins, rem, chunk=1 << 16):
    rem = np.asarray(rem, dtype=np.int64).reshape(-1, 2)
    m = len(rem)
    total = 1 << m
    out = np.empty((total, n), dtype=np.int16)
    first = np.zeros((m, n), dtype=np.int32)
    second = np.zeros((m, n), dtype=np.int32)
    first[np.arange(m), rem[:, 0]] = 1
    second[np.arange(m), rem[:, 1]] = 1
    base = np.asarray(base_wins, dtype=np.int32)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        bits = ((idx[:, None] >> np.arange(m)) & 1).astype(np.int32)
        wins = base + bits @ first + (1 - bits) @ second
        above = (wins[:, None, :] > wins[:, :, None]).sum(axis=2)
        tied = (wins[:, None, :] == wins[:, :, None]).sum(axis=2)
        out[idx] = (above * n + above + tied - 1).astype(np.int16)
    return out
