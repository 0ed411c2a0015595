"""Compiled inner loops."""
import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def four_point_max_doubled(d):
    # max over unordered quadruples of (largest pair sum - middle pair sum)
    n = d.shape[0]
    best = 0
    for x in range(n):
        for y in range(x + 1, n):
            dxy = d[x, y]
            for z in range(y + 1, n):
                dxz = d[x, z]
                dyz = d[y, z]
                for w in range(z + 1, n):
                    s1 = dxy + d[z, w]
                    s2 = dxz + d[y, w]
                    s3 = d[x, w] + dyz
                    if s1 >= s2:
                        if s2 >= s3:
                            v = s1 - s2
                        elif s1 >= s3:
                            v = s1 - s3
                        else:
                            v = s3 - s1
                    else:
                        if s1 >= s3:
                            v = s2 - s1
                        elif s2 >= s3:
                            v = s2 - s3
                        else:
                            v = s3 - s2
                    if v > best:
                        best = v
    return best


@numba.njit(cache=True, nogil=True)
def delta_length_dp(d, pts, delta):
    # best[j]: max sum (then max count) over chains 0 = i0 < ... < ik = j with
    # every hop distance >= delta; -1 marks unreachable
    m = pts.shape[0]
    best = np.full(m, -1, dtype=np.int64)
    count = np.zeros(m, dtype=np.int64)
    prev = np.full(m, -1, dtype=np.int64)
    best[0] = 0
    count[0] = 1
    for j in range(1, m):
        pj = pts[j]
        for i in range(j):
            if best[i] < 0:
                continue
            h = d[pts[i], pj]
            if h < delta:
                continue
            s = best[i] + h
            c = count[i] + 1
            if s > best[j] or (s == best[j] and c > count[j]):
                best[j] = s
                count[j] = c
                prev[j] = i
    return best, prev
