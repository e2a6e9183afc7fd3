"""Pure-Python bounded integer feasibility search.

Solves ``sum_k mult[k, l] * x[k] == target[l]`` for every constraint ``l``
with ``lo[k] <= x[k] <= hi[k]``. Every variable keeps a current interval;
each constraint tracks the least and greatest total its variables can still
reach. After every decision the intervals are narrowed to bounds
consistency (each variable's interval is cut to what the other variables of
each constraint can balance), with a trail to undo the narrowing on
backtrack. The branching variable is the unfixed one with the narrowest
interval (lowest index on ties); its values are tried in ascending order.

This module and ``_csearch.pyx`` implement the same algorithm and must visit
the same nodes in the same order.
"""

EXHAUSTED = 0
STOPPED = 1
BUDGET = 2


def _ceil_div(a, b):
    return -((-a) // b)


def search(lo, hi, var_ptr, var_line, var_mult, target, max_nodes, on_solution):
    """Run the search; return ``(status, nodes)``.

    ``on_solution`` receives a list of variable values and returns True to
    stop the search. Variable ``k`` touches constraints
    ``var_line[var_ptr[k]:var_ptr[k+1]]`` with the matching multiplicities.
    """
    L = [int(v) for v in lo]
    U = [int(v) for v in hi]
    ptr = [int(v) for v in var_ptr]
    vline = [int(v) for v in var_line]
    vmult = [int(v) for v in var_mult]
    tgt = [int(v) for v in target]
    nvars, nlines = len(L), len(tgt)
    if any(a > b for a, b in zip(L, U)):
        return EXHAUSTED, 0

    # constraint-major copy of the incidence lists
    count = [0] * (nlines + 1)
    for ell in vline:
        count[ell + 1] += 1
    lptr = [0] * (nlines + 1)
    for ell in range(nlines):
        lptr[ell + 1] = lptr[ell] + count[ell + 1]
    fill = lptr[:-1]
    lfill = list(fill)
    lvar = [0] * len(vline)
    lmult = [0] * len(vline)
    for k in range(nvars):
        for p in range(ptr[k], ptr[k + 1]):
            ell = vline[p]
            lvar[lfill[ell]] = k
            lmult[lfill[ell]] = vmult[p]
            lfill[ell] += 1

    smin = [0] * nlines
    smax = [0] * nlines
    for k in range(nvars):
        for p in range(ptr[k], ptr[k + 1]):
            m = vmult[p]
            a, b = m * L[k], m * U[k]
            if a > b:
                a, b = b, a
            smin[vline[p]] += a
            smax[vline[p]] += b

    trail = []  # (var, old lo, old hi)
    queue = []
    queued = [False] * nlines

    def set_bounds(k, a, b):
        trail.append((k, L[k], U[k]))
        for p in range(ptr[k], ptr[k + 1]):
            ell, m = vline[p], vmult[p]
            if m > 0:
                smin[ell] += m * (a - L[k])
                smax[ell] += m * (b - U[k])
            else:
                smin[ell] += m * (b - U[k])
                smax[ell] += m * (a - L[k])
            if not queued[ell]:
                queued[ell] = True
                queue.append(ell)
        L[k], U[k] = a, b

    def undo(mark):
        while len(trail) > mark:
            k, a, b = trail.pop()
            for p in range(ptr[k], ptr[k + 1]):
                ell, m = vline[p], vmult[p]
                if m > 0:
                    smin[ell] += m * (a - L[k])
                    smax[ell] += m * (b - U[k])
                else:
                    smin[ell] += m * (b - U[k])
                    smax[ell] += m * (a - L[k])
            L[k], U[k] = a, b

    def propagate():
        ok = True
        head = 0
        while head < len(queue):
            ell = queue[head]
            head += 1
            queued[ell] = False
            if not ok:
                continue
            t = tgt[ell]
            if t < smin[ell] or t > smax[ell]:
                ok = False
                continue
            for q in range(lptr[ell], lptr[ell + 1]):
                k = lvar[q]
                a, b = L[k], U[k]
                if a == b:
                    continue
                m = lmult[q]
                if m > 0:
                    y_lo = t - (smax[ell] - m * b)
                    y_hi = t - (smin[ell] - m * a)
                    na, nb = _ceil_div(y_lo, m), y_hi // m
                else:
                    y_lo = t - (smax[ell] - m * a)
                    y_hi = t - (smin[ell] - m * b)
                    na, nb = _ceil_div(y_hi, m), y_lo // m
                if na < a:
                    na = a
                if nb > b:
                    nb = b
                if na > nb:
                    ok = False
                    break
                if na != a or nb != b:
                    set_bounds(k, na, nb)
        del queue[:]
        return ok

    for ell in range(nlines):
        queued[ell] = True
        queue.append(ell)
    if not propagate():
        return EXHAUSTED, 0

    nodes = 0
    stack = []  # (trail mark, var, value, upper bound at branch time)
    descend = True
    while True:
        if descend:
            k, width = -1, 0
            for j in range(nvars):
                w = U[j] - L[j]
                if w and (k < 0 or w < width):
                    k, width = j, w
                    if w == 1:
                        break
            if k < 0:
                if on_solution(list(L)):
                    return STOPPED, nodes
                descend = False
                continue
            nodes += 1
            if nodes > max_nodes:
                return BUDGET, nodes
            v = L[k]
            stack.append((len(trail), k, v, U[k]))
            set_bounds(k, v, v)
            descend = propagate()
            continue
        # backtrack: move the deepest open decision to its next value
        while stack:
            mark, k, v, u = stack.pop()
            undo(mark)
            if v < u:
                nodes += 1
                if nodes > max_nodes:
                    return BUDGET, nodes
                stack.append((mark, k, v + 1, u))
                set_bounds(k, v + 1, v + 1)
                if propagate():
                    descend = True
                    break
        else:
            return EXHAUSTED, nodes
