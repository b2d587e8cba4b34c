"""Hot numeric kernels: list-scheduler inner loop and permutation scan.

Both kernels are plain functions over numpy arrays, compiled with numba's
@njit when available. Set QCOREMAP_NO_JIT=1 to force the pure-numpy path
(same source, interpreted); results are bit-identical either way. The
benchmark in benchmarks/compare_jit.py times the two paths side by side.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
    HAVE_NUMBA = False


def jit_disabled() -> bool:
    return os.environ.get("QCOREMAP_NO_JIT", "").lower() in ("1", "true", "yes")


def _schedule_impl(order, dur, anc, core, pred_ptr, pred_idx, pred_lag, n_cores, budget, l_init):
    """Greedy earliest-feasible-start scheduling in a fixed priority order.

    Levels are 1-based. occ[c, z] accumulates ancilla in use on core c at
    level z. Returns (start, occ, status); status nonzero means the level
    bound was exceeded (never happens when l_init is the serial bound).
    """
    n = order.shape[0]
    start = np.zeros(n, dtype=np.int64)
    occ = np.zeros((n_cores, l_init + 2), dtype=np.int64)
    for k in range(n):
        x = order[k]
        ready = np.int64(1)
        for e in range(pred_ptr[x], pred_ptr[x + 1]):
            p = pred_idx[e]
            cand = start[p] + dur[p] + pred_lag[e]
            if cand > ready:
                ready = cand
        c = core[x]
        a = anc[x]
        t = dur[x]
        s = ready
        while True:
            if s + t - 1 > l_init:
                return start, occ, 1
            ok = True
            z = s
            while z < s + t:
                if occ[c, z] + a > budget:
                    s = z + 1
                    ok = False
                    break
                z += 1
            if ok:
                break
        start[x] = s
        for z in range(s, s + t):
            occ[c, z] += a
    return start, occ, 0


def _qap_scan_impl(w, d):
    """Exhaustive assignment scan, lexicographic permutation order.

    Minimizes sum_{m != x} w[m, x] * d[p[m], p[x]]; strict improvement keeps
    the lexicographically smallest permutation on cost ties.
    """
    k = w.shape[0]
    perm = np.arange(k, dtype=np.int64)
    best = perm.copy()
    best_cost = np.float64(0.0)
    for m in range(k):
        for x in range(k):
            if m != x:
                best_cost += w[m, x] * d[perm[m], perm[x]]
    while True:
        # next lexicographic permutation, in place
        i = k - 2
        while i >= 0 and perm[i] >= perm[i + 1]:
            i -= 1
        if i < 0:
            break
        j = k - 1
        while perm[j] <= perm[i]:
            j -= 1
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
        lo = i + 1
        hi = k - 1
        while lo < hi:
            tmp = perm[lo]
            perm[lo] = perm[hi]
            perm[hi] = tmp
            lo += 1
            hi -= 1
        cost = np.float64(0.0)
        for m in range(k):
            for x in range(k):
                if m != x:
                    cost += w[m, x] * d[perm[m], perm[x]]
        if cost < best_cost:
            best_cost = cost
            best[:] = perm
    return best, best_cost


if HAVE_NUMBA:
    _schedule_jit = njit(cache=True)(_schedule_impl)
    _qap_scan_jit = njit(cache=True)(_qap_scan_impl)
else:  # pragma: no cover
    _schedule_jit = _schedule_impl
    _qap_scan_jit = _qap_scan_impl

if HAVE_NUMBA and not jit_disabled():
    schedule_kernel = _schedule_jit
    qap_scan_kernel = _qap_scan_jit
else:
    schedule_kernel = _schedule_impl
    qap_scan_kernel = _qap_scan_impl


def implementations():
    """Kernel variants by name, for parity tests and benchmarks."""
    out = {"numpy": (_schedule_impl, _qap_scan_impl)}
    if HAVE_NUMBA:
        out["numba"] = (_schedule_jit, _qap_scan_jit)
    return out
