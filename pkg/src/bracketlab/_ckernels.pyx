# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration loops.  Signatures mirror ``_pykernels``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline bint _next_perm(int[::1] a, int lo, int hi) noexcept nogil:
    """Advance a[lo:hi] to the next lexicographic permutation.

    Returns 0 and resets to ascending order once the last one is passed.
    """
    cdef int i = hi - 2, j, t
    while i >= lo and a[i] >= a[i + 1]:
        i -= 1
    if i < lo:
        j = hi - 1
        i = lo
        while i < j:
            t = a[i]; a[i] = a[j]; a[j] = t
            i += 1; j -= 1
        return 0
    j = hi - 1
    while a[j] <= a[i]:
        j -= 1
    t = a[i]; a[i] = a[j]; a[j] = t
    i += 1
    j = hi - 1
    while i < j:
        t = a[i]; a[i] = a[j]; a[j] = t
        i += 1; j -= 1
    return 1


cdef inline bint _advance(int[::1] perm, int[::1] bounds, int ngroups) noexcept nogil:
    cdef int g = ngroups - 1
    while g >= 0:
        if _next_perm(perm, bounds[g], bounds[g + 1]):
            return 1
        g -= 1
    return 0


def bracket_tally(int n, int[:, ::1] src, int[::1] win_place, int[::1] loss_place,
                  int n_classes, int[::1] gslots, int[::1] gvals, int[::1] gbounds):
    cdef int nm = src.shape[0]
    cdef int ngroups = gbounds.shape[0] - 1
    cdef int total_len = gbounds[ngroups]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.zeros((n, n_classes), dtype=np.int64)
    cdef long long[:, ::1] counts = out
    cdef int[::1] perm = np.array(gvals, dtype=np.int32)
    cdef int[::1] val = np.zeros(n + 2 * nm, dtype=np.int32)
    cdef int k, m, a, b, w, l
    with nogil:
        while True:
            for k in range(total_len):
                val[gslots[k]] = perm[k]
            for m in range(nm):
                a = val[src[m, 0]]
                b = val[src[m, 1]]
                if a > b:
                    w = a; l = b
                else:
                    w = b; l = a
                val[n + 2 * m] = w
                val[n + 2 * m + 1] = l
                if win_place[m] >= 0:
                    counts[w - 1, win_place[m]] += 1
                if loss_place[m] >= 0:
                    counts[l - 1, loss_place[m]] += 1
            if not _advance(perm, gbounds, ngroups):
                break
    return out


def rr_tally(int n, int[:, ::1] pairs, int[::1] gslots, int[::1] gvals, int[::1] gbounds):
    cdef int np_ = pairs.shape[0]
    cdef int ngroups = gbounds.shape[0] - 1
    cdef int total_len = gbounds[ngroups]
    cdef cnp.ndarray[cnp.int64_t, ndim=3] out = np.zeros((n, n, n), dtype=np.int64)
    cdef long long[:, :, ::1] counts = out
    cdef int[::1] perm = np.array(gvals, dtype=np.int32)
    cdef int[::1] strength = np.zeros(n, dtype=np.int32)
    cdef int[::1] wins = np.zeros(n, dtype=np.int32)
    cdef int k, p, q, a, b, above, tied
    with nogil:
        while True:
            for k in range(total_len):
                strength[gslots[k]] = perm[k]
            for p in range(n):
                wins[p] = 0
            for k in range(np_):
                a = pairs[k, 0]
                b = pairs[k, 1]
                if strength[a] > strength[b]:
                    wins[a] += 1
                else:
                    wins[b] += 1
            for p in range(n):
                above = 0
                tied = 0
                for q in range(n):
                    if wins[q] > wins[p]:
                        above += 1
                    elif wins[q] == wins[p]:
                        tied += 1
                counts[strength[p] - 1, above, above + tied - 1] += 1
            if not _advance(perm, gbounds, ngroups):
                break
    return out


def rr_completion_classes(int n, int[::1] base_wins, int[:, ::1] rem):
    cdef int m = rem.shape[0]
    cdef long long total = 1LL << m
    cdef cnp.ndarray[cnp.int16_t, ndim=2] out = np.empty((total, n), dtype=np.int16)
    cdef short[:, ::1] cls = out
    cdef int[::1] wins = np.zeros(n, dtype=np.int32)
    cdef long long c
    cdef int j, p, q, above, tied
    with nogil:
        for c in range(total):
            for p in range(n):
                wins[p] = base_wins[p]
            for j in range(m):
                if (c >> j) & 1:
                    wins[rem[j, 0]] += 1
                else:
                    wins[rem[j, 1]] += 1
            for p in range(n):
                above = 0
                tied = 0
                for q in range(n):
                    if wins[q] > wins[p]:
                        above += 1
                    elif wins[q] == wins[p]:
                        tied += 1
                cls[c, p] = <short>(above * n + above + tied - 1)
    return out
