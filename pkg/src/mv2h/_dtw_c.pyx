# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled DTW core over scaled integer costs.

Mirrors mv2h._dtw_py.dtw_core exactly; all accumulated costs must fit in
signed 64-bit integers, which the dispatcher checks before calling.
"""

from libc.stdlib cimport free, malloc


def dtw_core(const int[::1] t_pitch, const int[::1] t_off,
             const int[::1] g_pitch, const int[::1] g_off,
             long long denom, long long gap_scaled):
    cdef Py_ssize_t n = t_off.shape[0] - 1
    cdef Py_ssize_t m = g_off.shape[0] - 1
    cdef Py_ssize_t width = m + 1
    cdef Py_ssize_t i, j, a, b, a0, a1, b0, b1, row, max_sum, size
    cdef long long s, tp, best, cand
    cdef unsigned char move

    back_obj = bytearray((n + 1) * width)
    cdef unsigned char[::1] back = back_obj

    max_sum = 0
    if n > 0 and m > 0:
        a1 = 0
        for i in range(n):
            size = t_off[i + 1] - t_off[i]
            if size > a1:
                a1 = size
        b1 = 0
        for j in range(m):
            size = g_off[j + 1] - g_off[j]
            if size > b1:
                b1 = size
        max_sum = a1 + b1

    cdef long long* divtab = <long long*> malloc((max_sum + 1) * sizeof(long long))
    cdef long long* prev = <long long*> malloc(width * sizeof(long long))
    cdef long long* cur = <long long*> malloc(width * sizeof(long long))
    cdef long long* tmp
    if divtab == NULL or prev == NULL or cur == NULL:
        free(divtab)
        free(prev)
        free(cur)
        raise MemoryError()

    try:
        for s in range(2, max_sum + 1):
            divtab[s] = denom / s

        prev[0] = 0
        for j in range(1, width):
            prev[j] = prev[j - 1] + gap_scaled
            back[j] = 2
        for i in range(1, n + 1):
            row = i * width
            cur[0] = prev[0] + gap_scaled
            back[row] = 3
            a0 = t_off[i - 1]
            a1 = t_off[i]
            for j in range(1, width):
                b0 = g_off[j - 1]
                b1 = g_off[j]
                tp = 0
                a = a0
                b = b0
                while a < a1 and b < b1:
                    if t_pitch[a] == g_pitch[b]:
                        tp += 1
                        a += 1
                        b += 1
                    elif t_pitch[a] < g_pitch[b]:
                        a += 1
                    else:
                        b += 1
                s = (a1 - a0) + (b1 - b0)
                best = prev[j - 1] + (s - 2 * tp) * divtab[s]
                move = 1
                cand = cur[j - 1] + gap_scaled
                if cand < best:
                    best = cand
                    move = 2
                cand = prev[j] + gap_scaled
                if cand < best:
                    best = cand
                    move = 3
                cur[j] = best
                back[row + j] = move
            tmp = prev
            prev = cur
            cur = tmp
        return prev[m], back_obj
    finally:
        free(divtab)
        free(prev)
        free(cur)
