"""Pure-Python/numpy fallback for the hot kernels.

Same contracts as the compiled module; selected automatically when the
extension is unavailable or ``HTG_EVAL_NO_EXT`` is set.
"""

import numpy as np


def levenshtein_counts(a, b):
    """Edit distance between two int sequences with an S/I/D decomposition.

    Returns ``(distance, substitutions, insertions, deletions)``. Ties are
    broken substitution-first, then insertion, then deletion, so the
    decomposition is deterministic and S+I+D always equals the distance.
    """
    a = list(a)
    b = list(b)
    n, m = len(a), len(b)
    if n == 0:
        return m, 0, m, 0
    if m == 0:
        return n, 0, 0, n

    # Rows are reference positions; insertion consumes a hypothesis symbol.
    prev = [(j, 0, j, 0) for j in range(m + 1)]
    for i in range(1, n + 1):
        cur = [(i, 0, 0, i)] + [None] * m
        ai = a[i - 1]
        for j in range(1, m + 1):
            dc, ds, di, dd = prev[j - 1]
            sub = 0 if ai == b[j - 1] else 1
            diag = dc + sub
            lc = cur[j - 1][0] + 1
            uc = prev[j][0] + 1
            if diag <= lc and diag <= uc:
                cur[j] = (diag, ds + sub, di, dd)
            elif lc <= uc:
                _, ls, li, ld = cur[j - 1]
                cur[j] = (lc, ls, li + 1, ld)
            else:
                _, us, ui, ud = prev[j]
                cur[j] = (uc, us, ui, ud + 1)
        prev = cur
    return prev[m]


def witness_edge_times(dist_wl, second_nearest):
    """Relaxation at which each landmark pair becomes witnessed.

    ``dist_wl`` is the W x L witness-to-landmark distance matrix and
    ``second_nearest`` holds each witness's distance to its second-nearest
    landmark. Entry (i, j) of the result is
    ``max(0, min_w(max(d_wi, d_wj) - second_nearest_w))``.
    """
    dist_wl = np.asarray(dist_wl, dtype=np.float64)
    second_nearest = np.asarray(second_nearest, dtype=np.float64)
    n_w, n_l = dist_wl.shape
    out = np.full((n_l, n_l), np.inf)
    # Chunk witnesses to bound the W x L x L temporary.
    chunk = max(1, int(4_000_000 // (n_l * n_l)) or 1)
    for start in range(0, n_w, chunk):
        block = dist_wl[start : start + chunk]
        relax = np.maximum(block[:, :, None], block[:, None, :])
        relax -= second_nearest[start : start + chunk, None, None]
        np.minimum(out, relax.min(axis=0), out=out)
    np.maximum(out, 0.0, out=out)
    np.fill_diagonal(out, 0.0)
    return out
