"""Transportation simplex on the complete bipartite graph.

Exact primal simplex specialized to the balanced transportation problem:
the basis is a spanning tree over the n source and m target nodes, dual
potentials are recomputed from the tree each pivot, and the entering arc
comes from a cyclic block scan of reduced costs (Dantzig within a block).
Degenerate stalls switch to Bland's rule (first negative arc in row-major
order, lowest-index leaving arc), which guarantees finite termination.

The initial basis is a matrix-minimum greedy: ship along cells in
increasing cost order, then complete the forest with zero-flow arcs. On
the distance-based costs used here this starts within a few percent of
optimal and cuts pivot counts by an order of magnitude relative to the
northwest-corner start.

Final basic flows are recomputed from the tree by leaf stripping, so the
returned flows are exact functions of the marginals rather than the sum
of thousands of pivot updates.

Plain-Python fallbacks run when numba is unavailable (slow, same results).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency normally
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


REDUCED_COST_TOL = 1e-9
MAX_PIVOTS = 2_000_000
BLOCK_ROWS = 16

STATUS_OPTIMAL = 0
STATUS_PIVOT_LIMIT = 2


@njit(cache=True)
def _greedy_basis(a, b, order, m):
    """Initial spanning-tree basis from a matrix-minimum greedy pass."""
    n = a.shape[0]
    V = n + m
    nb = V - 1
    bi = np.empty(nb, dtype=np.int64)
    bj = np.empty(nb, dtype=np.int64)
    bf = np.empty(nb, dtype=np.float64)
    ra = a.copy()
    rb = b.copy()
    uf = np.empty(V, dtype=np.int64)
    for x in range(V):
        uf[x] = x
    k = 0
    for t in range(order.shape[0]):
        arc = order[t]
        i = arc // m
        j = arc - i * m
        if ra[i] <= 0.0 or rb[j] <= 0.0:
            continue
        f = ra[i] if ra[i] < rb[j] else rb[j]
        bi[k] = i
        bj[k] = j
        bf[k] = f
        k += 1
        ra[i] -= f
        rb[j] -= f
        # positive shipments always join distinct components (each existing
        # component has exactly one unexhausted node), so no cycle check
        x = i
        while uf[x] != x:
            x = uf[x]
        y = n + j
        while uf[y] != y:
            y = uf[y]
        uf[x] = y
        z = i
        while uf[z] != y:
            w = uf[z]
            uf[z] = y
            z = w
        if k == nb:
            break
    if k < nb:
        # complete the forest with zero-flow arcs, cheapest first
        for t in range(order.shape[0]):
            arc = order[t]
            i = arc // m
            j = arc - i * m
            x = i
            while uf[x] != x:
                x = uf[x]
            y = n + j
            while uf[y] != y:
                y = uf[y]
            if x == y:
                continue
            uf[x] = y
            z = i
            while uf[z] != y:
                w = uf[z]
                uf[z] = y
                z = w
            z = n + j
            while uf[z] != y:
                w = uf[z]
                uf[z] = y
                z = w
            bi[k] = i
            bj[k] = j
            bf[k] = 0.0
            k += 1
            if k == nb:
                break
    return bi, bj, bf


@njit(cache=True)
def _simplex(a, b, C, bi, bj, bf, tol, block_rows, max_iter):
    """Pivot to optimality from the given basis; returns duals and status."""
    n = a.shape[0]
    m = b.shape[0]
    V = n + m
    nb = V - 1

    parent = np.empty(V, dtype=np.int64)
    parent_arc = np.empty(V, dtype=np.int64)
    u = np.empty(n, dtype=np.float64)
    v = np.empty(m, dtype=np.float64)
    order = np.empty(V, dtype=np.int64)
    head = np.empty(V, dtype=np.int64)
    nxt = np.empty(2 * nb, dtype=np.int64)
    path_a = np.empty(V, dtype=np.int64)
    path_b = np.empty(V, dtype=np.int64)

    status = STATUS_OPTIMAL
    it = 0
    cursor = 0
    degen_streak = 0
    bland = False

    while True:
        # tree adjacency: arc k becomes half-edges 2k (at its row) and 2k+1
        for x in range(V):
            head[x] = -1
        for k in range(nb):
            r = bi[k]
            c = n + bj[k]
            nxt[2 * k] = head[r]
            head[r] = 2 * k
            nxt[2 * k + 1] = head[c]
            head[c] = 2 * k + 1
        # BFS from node 0 sets parents and duals (u[0] = 0, basic arcs tight)
        for x in range(V):
            parent[x] = -2
        parent[0] = -1
        parent_arc[0] = -1
        order[0] = 0
        u[0] = 0.0
        qh = 0
        qt = 1
        while qh < qt:
            x = order[qh]
            qh += 1
            e = head[x]
            while e != -1:
                k = e >> 1
                y = (n + bj[k]) if (e & 1) == 0 else bi[k]
                if parent[y] == -2:
                    parent[y] = x
                    parent_arc[y] = k
                    if y >= n:
                        v[y - n] = C[bi[k], bj[k]] - u[bi[k]]
                    else:
                        u[y] = C[bi[k], bj[k]] - v[bj[k]]
                    order[qt] = y
                    qt += 1
                e = nxt[e]

        # entering arc
        ei = -1
        ej = -1
        if not bland:
            best = -tol
            rows_done = 0
            while rows_done < n:
                hi = cursor + block_rows
                if hi > n:
                    hi = n
                for r in range(cursor, hi):
                    ur = u[r]
                    for c in range(m):
                        red = C[r, c] - ur - v[c]
                        if red < best:
                            best = red
                            ei = r
                            ej = c
                rows_done += hi - cursor
                cursor = hi
                if cursor >= n:
                    cursor = 0
                if ei >= 0:
                    break
        else:
            for r in range(n):
                ur = u[r]
                for c in range(m):
                    if C[r, c] - ur - v[c] < -tol:
                        ei = r
                        ej = c
                        break
                if ei >= 0:
                    break
        if ei < 0:
            break  # dual feasible: optimal
        it += 1
        if it > max_iter:
            status = STATUS_PIVOT_LIMIT
            break

        # the entering arc closes a unique tree cycle; collect both root paths
        la = 0
        x = ei
        while x != -1:
            path_a[la] = x
            la += 1
            x = parent[x]
        lb = 0
        x = n + ej
        while x != -1:
            path_b[lb] = x
            lb += 1
            x = parent[x]
        ia = la - 1
        ib = lb - 1
        while ia >= 0 and ib >= 0 and path_a[ia] == path_b[ib]:
            ia -= 1
            ib -= 1
        # flow decreases on parent arcs of row nodes along path_a and of col
        # nodes along path_b (signs alternate around the bipartite cycle)
        theta = 1.0e300
        leave = -1
        leave_key = -1
        for s in range(ia + 1):
            x = path_a[s]
            if x < n:
                k = parent_arc[x]
                f = bf[k]
                key = bi[k] * m + bj[k]
                if f < theta or (f == theta and key < leave_key):
                    theta = f
                    leave = k
                    leave_key = key
        for s in range(ib + 1):
            x = path_b[s]
            if x >= n:
                k = parent_arc[x]
                f = bf[k]
                key = bi[k] * m + bj[k]
                if f < theta or (f == theta and key < leave_key):
                    theta = f
                    leave = k
                    leave_key = key
        if leave < 0:
            status = STATUS_PIVOT_LIMIT
            break
        for s in range(ia + 1):
            x = path_a[s]
            k = parent_arc[x]
            if x < n:
                bf[k] -= theta
            else:
                bf[k] += theta
        for s in range(ib + 1):
            x = path_b[s]
            k = parent_arc[x]
            if x >= n:
                bf[k] -= theta
            else:
                bf[k] += theta
        bi[leave] = ei
        bj[leave] = ej
        bf[leave] = theta
        if theta <= 0.0:
            degen_streak += 1
            if degen_streak > V:
                bland = True
        else:
            degen_streak = 0
            bland = False

    # leaf stripping: recompute basic flows exactly from the final tree
    deg = np.zeros(V, dtype=np.int64)
    for k in range(nb):
        deg[bi[k]] += 1
        deg[n + bj[k]] += 1
    for x in range(V):
        head[x] = -1
    for k in range(nb):
        r = bi[k]
        c = n + bj[k]
        nxt[2 * k] = head[r]
        head[r] = 2 * k
        nxt[2 * k + 1] = head[c]
        head[c] = 2 * k + 1
    res = np.empty(V, dtype=np.float64)
    for x in range(n):
        res[x] = a[x]
    for x in range(m):
        res[n + x] = b[x]
    used = np.zeros(nb, dtype=np.uint8)
    qh = 0
    qt = 0
    for x in range(V):
        if deg[x] == 1:
            order[qt] = x
            qt += 1
    while qh < qt:
        x = order[qh]
        qh += 1
        if deg[x] != 1:
            continue
        e = head[x]
        k = -1
        while e != -1:
            if used[e >> 1] == 0:
                k = e >> 1
                break
            e = nxt[e]
        if k < 0:
            continue
        f = res[x]
        if f < 0.0:
            f = 0.0  # cancellation residue; magnitude at most a few ulp
        bf[k] = f
        used[k] = 1
        y = (n + bj[k]) if x == bi[k] else bi[k]
        res[y] -= res[x]
        res[x] = 0.0
        deg[x] -= 1
        deg[y] -= 1
        if deg[y] == 1:
            order[qt] = y
            qt += 1

    return u, v, status, it


def solve_arrays(
    a: np.ndarray, b: np.ndarray, C: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Solve min <C, X> over couplings of (a, b); all entries of a, b > 0.

    Returns (rows, cols, flows, u, v) where the first three give the basic
    arcs (the support of an optimal vertex plan) and u, v are optimal duals
    anchored at u[0] = 0.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    n, m = C.shape
    if a.shape != (n,) or b.shape != (m,):
        raise ValueError("marginal lengths do not match the cost matrix")
    # stable argsort is a radix sort for integer-valued costs stored as ints
    flat = C.ravel()
    as_int = flat.astype(np.int64)
    if np.all(flat == as_int):
        order = np.argsort(as_int, kind="stable")
    else:
        order = np.argsort(flat, kind="stable")
    bi, bj, bf = _greedy_basis(a, b, order, m)
    u, v, status, _ = _simplex(
        a, b, C, bi, bj, bf, REDUCED_COST_TOL, BLOCK_ROWS, MAX_PIVOTS
    )
    if status != STATUS_OPTIMAL:
        raise RuntimeError(f"transportation simplex did not terminate (status {status})")
    return bi, bj, bf, u, v
