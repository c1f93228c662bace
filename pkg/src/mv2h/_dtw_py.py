"""Pure-Python DTW core over scaled integer costs.

Reference implementation mirrored by the compiled kernel in _dtw_c.pyx.
Python ints never overflow, so this core also serves as the fallback when
the int64 bound would be exceeded.
"""

from __future__ import annotations


def dtw_core(
    t_pitch: list[int],
    t_off: list[int],
    g_pitch: list[int],
    g_off: list[int],
    denom: int,
    gap_scaled: int,
) -> tuple[int, bytearray]:
    """Fill the alignment DP table.

    Chord i of the transcription holds pitches t_pitch[t_off[i]:t_off[i+1]],
    sorted ascending; likewise for the ground truth. All costs are already
    scaled by `denom`, so cell distances (s - 2*tp) * (denom // s) and the
    gap penalty are exact integers.

    Returns (total scaled cost, back) where back is a flat
    (n+1) * (m+1) bytearray of move codes: 1 diagonal match, 2 ground-truth
    chord against a gap, 3 transcription chord against a gap.
    """
    n = len(t_off) - 1
    m = len(g_off) - 1
    width = m + 1
    back = bytearray((n + 1) * width)

    max_sum = 0
    if n and m:
        max_t = max(t_off[i + 1] - t_off[i] for i in range(n))
        max_g = max(g_off[j + 1] - g_off[j] for j in range(m))
        max_sum = max_t + max_g
    divtab = [0] * (max_sum + 1)
    for s in range(2, max_sum + 1):
        divtab[s] = denom // s

    prev = [j * gap_scaled for j in range(width)]
    for j in range(1, width):
        back[j] = 2
    cur = [0] * width
    for i in range(1, n + 1):
        row = i * width
        cur[0] = i * gap_scaled
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
                pa = t_pitch[a]
                pb = g_pitch[b]
                if pa == pb:
                    tp += 1
                    a += 1
                    b += 1
                elif pa < pb:
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
        prev, cur = cur, prev
    return prev[m], back
