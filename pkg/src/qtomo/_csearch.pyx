# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bounded integer feasibility search.

Same algorithm, node order and return contract as ``qtomo._pysearch``.
"""
import numpy as np

EXHAUSTED = 0
STOPPED = 1
BUDGET = 2


cdef inline long long _floor_div(long long a, long long b) nogil:
    cdef long long q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline long long _ceil_div(long long a, long long b) nogil:
    return -_floor_div(-a, b)


cdef struct State:
    long long *L
    long long *U
    long long *ptr
    long long *vline
    long long *vmult
    long long *lptr
    long long *lvar
    long long *lmult
    long long *tgt
    long long *smin
    long long *smax
    long long *trail_var
    long long *trail_lo
    long long *trail_hi
    Py_ssize_t ntrail
    long long *queue
    signed char *queued
    Py_ssize_t nlines
    Py_ssize_t qhead
    Py_ssize_t qlen


cdef inline void _shift(State *s, Py_ssize_t k, long long a, long long b) nogil:
    # move the per-constraint totals from k's current interval to [a, b]
    cdef Py_ssize_t p
    cdef long long m, ell
    for p in range(s.ptr[k], s.ptr[k + 1]):
        ell = s.vline[p]
        m = s.vmult[p]
        if m > 0:
            s.smin[ell] += m * (a - s.L[k])
            s.smax[ell] += m * (b - s.U[k])
        else:
            s.smin[ell] += m * (b - s.U[k])
            s.smax[ell] += m * (a - s.L[k])


cdef inline void _set_bounds(State *s, Py_ssize_t k, long long a, long long b) nogil:
    cdef Py_ssize_t p
    cdef long long ell
    s.trail_var[s.ntrail] = k
    s.trail_lo[s.ntrail] = s.L[k]
    s.trail_hi[s.ntrail] = s.U[k]
    s.ntrail += 1
    _shift(s, k, a, b)
    for p in range(s.ptr[k], s.ptr[k + 1]):
        ell = s.vline[p]
        if not s.queued[ell]:
            s.queued[ell] = 1
            s.queue[(s.qhead + s.qlen) % s.nlines] = ell
            s.qlen += 1
    s.L[k] = a
    s.U[k] = b


cdef inline void _undo(State *s, Py_ssize_t mark) nogil:
    cdef Py_ssize_t k
    while s.ntrail > mark:
        s.ntrail -= 1
        k = s.trail_var[s.ntrail]
        _shift(s, k, s.trail_lo[s.ntrail], s.trail_hi[s.ntrail])
        s.L[k] = s.trail_lo[s.ntrail]
        s.U[k] = s.trail_hi[s.ntrail]


cdef bint _propagate(State *s) nogil:
    cdef bint ok = True
    cdef long long ell, t, a, b, m, y_lo, y_hi, na, nb
    cdef Py_ssize_t q, k
    while s.qlen > 0:
        ell = s.queue[s.qhead]
        s.qhead = (s.qhead + 1) % s.nlines
        s.qlen -= 1
        s.queued[ell] = 0
        if not ok:
            continue
        t = s.tgt[ell]
        if t < s.smin[ell] or t > s.smax[ell]:
            ok = False
            continue
        for q in range(s.lptr[ell], s.lptr[ell + 1]):
            k = s.lvar[q]
            a = s.L[k]
            b = s.U[k]
            if a == b:
                continue
            m = s.lmult[q]
            if m > 0:
                y_lo = t - (s.smax[ell] - m * b)
                y_hi = t - (s.smin[ell] - m * a)
                na = _ceil_div(y_lo, m)
                nb = _floor_div(y_hi, m)
            else:
                y_lo = t - (s.smax[ell] - m * a)
                y_hi = t - (s.smin[ell] - m * b)
                na = _ceil_div(y_hi, m)
                nb = _floor_div(y_lo, m)
            if na < a:
                na = a
            if nb > b:
                nb = b
            if na > nb:
                ok = False
                break
            if na != a or nb != b:
                _set_bounds(s, k, na, nb)
    return ok


def search(lo_in, hi_in, ptr_in, line_in, mult_in, target_in,
           long long max_nodes, on_solution):
    L_arr = np.array(lo_in, dtype=np.int64)
    U_arr = np.array(hi_in, dtype=np.int64)
    ptr_arr = np.ascontiguousarray(ptr_in, dtype=np.int64)
    vline_arr = np.ascontiguousarray(line_in, dtype=np.int64)
    vmult_arr = np.ascontiguousarray(mult_in, dtype=np.int64)
    tgt_arr = np.ascontiguousarray(target_in, dtype=np.int64)
    cdef Py_ssize_t nvars = L_arr.shape[0]
    cdef Py_ssize_t nlines = tgt_arr.shape[0]
    cdef Py_ssize_t nnz = vline_arr.shape[0]
    if np.any(L_arr > U_arr):
        return EXHAUSTED, 0

    # constraint-major copy of the incidence lists, stable in variable order
    order = np.argsort(vline_arr, kind="stable")
    lvar_arr = np.ascontiguousarray(np.repeat(np.arange(nvars, dtype=np.int64), np.diff(ptr_arr))[order])
    lmult_arr = np.ascontiguousarray(vmult_arr[order])
    lptr_arr = np.zeros(nlines + 1, dtype=np.int64)
    if nlines:
        lptr_arr[1:] = np.cumsum(np.bincount(vline_arr, minlength=nlines))

    lo_c = np.repeat(L_arr, np.diff(ptr_arr)) * vmult_arr
    hi_c = np.repeat(U_arr, np.diff(ptr_arr)) * vmult_arr
    smin_arr = np.bincount(vline_arr, weights=np.minimum(lo_c, hi_c), minlength=nlines).astype(np.int64)
    smax_arr = np.bincount(vline_arr, weights=np.maximum(lo_c, hi_c), minlength=nlines).astype(np.int64)

    cap = int((U_arr - L_arr).sum()) + 1
    trail_var_arr = np.zeros(cap, dtype=np.int64)
    trail_lo_arr = np.zeros(cap, dtype=np.int64)
    trail_hi_arr = np.zeros(cap, dtype=np.int64)
    queue_arr = np.zeros(max(nlines, 1), dtype=np.int64)
    queued_arr = np.zeros(max(nlines, 1), dtype=np.int8)
    stack_mark_arr = np.zeros(nvars + 1, dtype=np.int64)
    stack_var_arr = np.zeros(nvars + 1, dtype=np.int64)
    stack_val_arr = np.zeros(nvars + 1, dtype=np.int64)
    stack_top_arr = np.zeros(nvars + 1, dtype=np.int64)

    cdef long long[::1] L = L_arr
    cdef long long[::1] U = U_arr
    cdef long long[::1] ptr = ptr_arr
    cdef long long[::1] vline = vline_arr
    cdef long long[::1] vmult = vmult_arr
    cdef long long[::1] lptr = lptr_arr
    cdef long long[::1] lvar = lvar_arr
    cdef long long[::1] lmult = lmult_arr
    cdef long long[::1] tgt = tgt_arr
    cdef long long[::1] smin = smin_arr
    cdef long long[::1] smax = smax_arr
    cdef long long[::1] trail_var = trail_var_arr
    cdef long long[::1] trail_lo = trail_lo_arr
    cdef long long[::1] trail_hi = trail_hi_arr
    cdef long long[::1] queue = queue_arr
    cdef signed char[::1] queued = queued_arr
    cdef long long[::1] st_mark = stack_mark_arr
    cdef long long[::1] st_var = stack_var_arr
    cdef long long[::1] st_val = stack_val_arr
    cdef long long[::1] st_top = stack_top_arr

    cdef State s
    cdef long long dummy = 0
    s.L = &L[0] if nvars else &dummy
    s.U = &U[0] if nvars else &dummy
    s.ptr = &ptr[0]
    s.vline = &vline[0] if nnz else &dummy
    s.vmult = &vmult[0] if nnz else &dummy
    s.lptr = &lptr[0]
    s.lvar = &lvar[0] if nnz else &dummy
    s.lmult = &lmult[0] if nnz else &dummy
    s.tgt = &tgt[0] if nlines else &dummy
    s.smin = &smin[0] if nlines else &dummy
    s.smax = &smax[0] if nlines else &dummy
    s.trail_var = &trail_var[0]
    s.trail_lo = &trail_lo[0]
    s.trail_hi = &trail_hi[0]
    s.ntrail = 0
    s.queue = &queue[0]
    s.queued = &queued[0]
    s.nlines = nlines
    s.qhead = 0
    s.qlen = 0

    cdef Py_ssize_t ell, j, k, depth = 0
    cdef long long w, width, v, u, nodes = 0
    cdef Py_ssize_t mark
    cdef bint descend, found

    for ell in range(nlines):
        s.queued[ell] = 1
        s.queue[ell] = ell
    s.qlen = nlines
    if not _propagate(&s):
        return EXHAUSTED, 0

    descend = True
    while True:
        if descend:
            k = -1
            width = 0
            for j in range(nvars):
                w = s.U[j] - s.L[j]
                if w and (k < 0 or w < width):
                    k = j
                    width = w
                    if w == 1:
                        break
            if k < 0:
                if on_solution(L_arr.tolist()):
                    return STOPPED, nodes
                descend = False
                continue
            nodes += 1
            if nodes > max_nodes:
                return BUDGET, nodes
            v = s.L[k]
            st_mark[depth] = s.ntrail
            st_var[depth] = k
            st_val[depth] = v
            st_top[depth] = s.U[k]
            depth += 1
            _set_bounds(&s, k, v, v)
            descend = _propagate(&s)
            continue
        # backtrack: move the deepest open decision to its next value
        found = False
        while depth > 0:
            depth -= 1
            mark = st_mark[depth]
            k = st_var[depth]
            v = st_val[depth]
            u = st_top[depth]
            _undo(&s, mark)
            if v < u:
                nodes += 1
                if nodes > max_nodes:
                    return BUDGET, nodes
                st_val[depth] = v + 1
                depth += 1
                _set_bounds(&s, k, v + 1, v + 1)
                if _propagate(&s):
                    found = True
                    break
        if not found:
            return EXHAUSTED, nodes
        descend = True
