"""Compiled decoder kernels.

Per-path state is two flat buffers: ``pbuf`` holds the stage log-probability
pairs (layers 1..n, node beta's pair at poff[l] + 2*beta), ``cbuf`` holds the
partial-sum bits in the same layout (slot parity instead of bit hypothesis).
The channel posteriors (layer 0) are shared read-only.

All metric arithmetic lives in ``_mstar``/``_lsum`` so every decoder produces
bit-identical metrics for the same path.
"""

import math

import numpy as np
from numba import njit

from .channel import LOG_ZERO

_LZ = LOG_ZERO


@njit(cache=True)
def _mstar(a, b):
    if a <= _LZ:
        if b <= _LZ:
            return _LZ
        return b
    if b <= _LZ:
        return a
    if a >= b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@njit(cache=True)
def _mmax(a, b):
    # max-approximation of the Jacobian logarithm (no correction term)
    if a >= b:
        return a
    return b


@njit(cache=True)
def _lsum(a, b):
    s = a + b
    if s < _LZ:
        return _LZ
    return s


@njit(cache=True)
def _sweep(phase, n, pbuf, cbuf, chan, poff, approx):
    """Node updates for one path extension; returns (m0, m1, ops)."""
    lam = n
    ph = phase
    while (ph & 1) == 0 and lam > 1:
        lam -= 1
        ph >>= 1
    ops = 0
    for l in range(lam, n + 1):
        width = 1 << (n - l)
        base = poff[l]
        if l == 1:
            src = chan
            sbase = 0
        else:
            src = pbuf
            sbase = poff[l - 1]
        if ((phase >> (n - l)) & 1) == 0:
            for b in range(width):
                i0 = sbase + 4 * b
                l0 = src[i0]
                l1 = src[i0 + 1]
                r0 = src[i0 + 2]
                r1 = src[i0 + 3]
                if approx == 0:
                    pbuf[base + 2 * b] = _mstar(_lsum(l0, r0), _lsum(l1, r1))
                    pbuf[base + 2 * b + 1] = _mstar(_lsum(l1, r0), _lsum(l0, r1))
                else:
                    pbuf[base + 2 * b] = _mmax(_lsum(l0, r0), _lsum(l1, r1))
                    pbuf[base + 2 * b + 1] = _mmax(_lsum(l1, r0), _lsum(l0, r1))
        else:
            for b in range(width):
                i0 = sbase + 4 * b
                if cbuf[base + 2 * b] == 0:
                    pbuf[base + 2 * b] = _lsum(src[i0], src[i0 + 2])
                    pbuf[base + 2 * b + 1] = _lsum(src[i0 + 1], src[i0 + 3])
                else:
                    pbuf[base + 2 * b] = _lsum(src[i0 + 1], src[i0 + 2])
                    pbuf[base + 2 * b + 1] = _lsum(src[i0], src[i0 + 3])
        ops += width
    return pbuf[poff[n]], pbuf[poff[n] + 1], ops


@njit(cache=True)
def _absorb(phase, n, cbuf, poff, bit):
    """Feed a decided bit into the partial sums."""
    cbuf[poff[n] + (phase & 1)] = bit
    lam = n
    ph = phase
    while (ph & 1) == 1 and lam > 1:
        psi = ph >> 1
        par = psi & 1
        width = 1 << (n - lam)
        cb = poff[lam]
        db = poff[lam - 1]
        for b in range(width):
            e = cbuf[cb + 2 * b]
            o = cbuf[cb + 2 * b + 1]
            cbuf[db + 4 * b + par] = e ^ o
            cbuf[db + 4 * b + 2 + par] = o
        lam -= 1
        ph = psi


@njit(cache=True)
def sc_kernel(chan, info_mask, frozen_vals, n, poff, approx):
    N = 1 << n
    pbuf = np.empty(2 * (N - 1), np.float64)
    cbuf = np.zeros(2 * (N - 1), np.int8)
    ubits = np.zeros(N, np.int8)
    metric = 0.0
    ops = 0
    for i in range(N):
        m0, m1, o = _sweep(i, n, pbuf, cbuf, chan, poff, approx)
        ops += o
        if info_mask[i] == 1:
            if m0 >= m1:
                b = 0
                metric = m0
            else:
                b = 1
                metric = m1
        else:
            b = frozen_vals[i]
        ubits[i] = b
        _absorb(i, n, cbuf, poff, b)
    return ubits, metric, ops


@njit(cache=True)
def forced_kernel(chan, labels, info_mask, n, poff, approx):
    """Metric recursion along fixed labels; returns per-bit pairs and the
    path metric under the frozen-carry rule."""
    N = 1 << n
    pbuf = np.empty(2 * (N - 1), np.float64)
    cbuf = np.zeros(2 * (N - 1), np.int8)
    pairs = np.empty((N, 2), np.float64)
    metric = 0.0
    ops = 0
    for i in range(N):
        m0, m1, o = _sweep(i, n, pbuf, cbuf, chan, poff, approx)
        ops += o
        pairs[i, 0] = m0
        pairs[i, 1] = m1
        b = labels[i]
        if info_mask[i] == 1:
            metric = m0 if b == 0 else m1
        _absorb(i, n, cbuf, poff, b)
    return pairs, metric, ops


@njit(cache=True)
def scl_kernel(chan, info_mask, frozen_vals, n, poff, L, log_tau, approx):
    """Breadth-first width-L search; returns the full surviving list.

    Paths reference physical state rows through ``rowof``: when only one
    child of a parent survives the competition it inherits the parent's
    row in place, so state copies happen only where the list genuinely
    forks.
    """
    N = 1 << n
    S = 2 * (N - 1)
    nrows = 2 * L
    pb = np.empty((nrows, S), np.float64)
    cb = np.zeros((nrows, S), np.int8)
    ub = np.zeros((nrows, N), np.int8)
    rowof = np.empty(L, np.int32)
    newrow = np.empty(L, np.int32)
    rfree = np.empty(nrows, np.int32)
    claimed = np.empty(L, np.uint8)
    met = np.zeros(L, np.float64)
    lex = np.zeros(L, np.int64)
    lex2 = np.empty(L, np.int64)

    cm = np.empty(2 * L, np.float64)
    cpar = np.empty(2 * L, np.int32)
    cbit = np.empty(2 * L, np.int8)
    ckey = np.empty(2 * L, np.int64)
    order = np.empty(2 * L, np.int32)

    for w in range(nrows - 1):
        rfree[w] = nrows - 1 - w
    nfree = nrows - 1
    rowof[0] = 0
    A = 1
    ops = 0
    pruned = 0
    for i in range(N):
        for a in range(A):
            m0, m1, o = _sweep(i, n, pb[rowof[a]], cb[rowof[a]], chan, poff, approx)
            ops += o
            cm[2 * a] = m0
            cm[2 * a + 1] = m1
        if info_mask[i] == 0:
            fb = frozen_vals[i]
            for a in range(A):
                ub[rowof[a], i] = fb
                _absorb(i, n, cb[rowof[a]], poff, fb)
            continue
        nc = 2 * A
        for a in range(A):
            for b in range(2):
                j = 2 * a + b
                cpar[j] = a
                cbit[j] = b
                ckey[j] = lex[a] * 2 + b
        # pruning: drop candidates more than log_tau below the level best
        nkeep = nc
        if log_tau < np.inf:
            amax = cm[0]
            for j in range(1, nc):
                if cm[j] > amax:
                    amax = cm[j]
            thr = amax - log_tau
            k = 0
            for j in range(nc):
                if cm[j] >= thr:
                    cm[k] = cm[j]
                    cpar[k] = cpar[j]
                    cbit[k] = cbit[j]
                    ckey[k] = ckey[j]
                    k += 1
            pruned += nc - k
            nkeep = k
        # order by metric descending, label-lex ascending (insertion sort)
        for j in range(nkeep):
            order[j] = j
        for j in range(1, nkeep):
            cur = order[j]
            k = j - 1
            while k >= 0:
                o_k = order[k]
                if cm[o_k] < cm[cur] or (cm[o_k] == cm[cur] and ckey[o_k] > ckey[cur]):
                    order[k + 1] = o_k
                    k -= 1
                else:
                    break
            order[k + 1] = cur
        Anew = nkeep if nkeep < L else L
        # assign rows: first surviving child of a parent reuses its row,
        # further ones copy it
        for a in range(A):
            claimed[a] = 0
        for r in range(Anew):
            c = order[r]
            p = cpar[c]
            if claimed[p] == 0:
                claimed[p] = 1
                newrow[r] = rowof[p]
            else:
                w = rfree[nfree - 1]
                nfree -= 1
                pb[w, :] = pb[rowof[p], :]
                cb[w, :] = cb[rowof[p], :]
                ub[w, :] = ub[rowof[p], :]
                newrow[r] = w
        for a in range(A):
            if claimed[a] == 0:
                rfree[nfree] = rowof[a]
                nfree += 1
        for r in range(Anew):
            c = order[r]
            rowof[r] = newrow[r]
            ub[rowof[r], i] = cbit[c]
            met[r] = cm[c]
            lex2[r] = ckey[c]
        # lex ranks of the survivors (keys are distinct)
        for r in range(Anew):
            rank = 0
            for q in range(Anew):
                if lex2[q] < lex2[r]:
                    rank += 1
            lex[r] = rank
        A = Anew
        for a in range(A):
            _absorb(i, n, cb[rowof[a]], poff, ub[rowof[a], i])
    best = 0
    for a in range(1, A):
        if met[a] > met[best] or (met[a] == met[best] and lex[a] < lex[best]):
            best = a
    out_ub = np.empty((A, N), np.int8)
    for a in range(A):
        out_ub[a, :] = ub[rowof[a], :]
    return out_ub, met, lex, A, best, ops, pruned


@njit(cache=True)
def _ranks_before(met, plen, ub, s1, s2):
    """Total order: metric desc, then length desc, then label lex asc."""
    if met[s1] != met[s2]:
        return met[s1] > met[s2]
    if plen[s1] != plen[s2]:
        return plen[s1] > plen[s2]
    for t in range(plen[s1]):
        if ub[s1, t] != ub[s2, t]:
            return ub[s1, t] < ub[s2, t]
    return False


@njit(cache=True)
def stack_kernel(chan, info_mask, frozen_vals, n, poff, L, D, log_tau, hybrid, approx):
    """Best-first stack search (SCS) and its hybrid variant (SCH).

    hybrid == 0: capacity overflows evict the lowest-ranked entry (SCS).
    hybrid == 1: no capacity eviction; a waiting mode equalizes path
    lengths whenever free space drops to 2L-1 or less (SCH).

    Per-length expansion is capped at L by the counting vector; entries
    that can no longer be among the L expanded at their length are removed
    eagerly, which is what keeps occupancy within D.

    Returns (ubits, metric, ops, pruned, cvec, peak, status); status != 0
    flags a capacity violation (1) or an exhausted stack (2).
    """
    N = 1 << n
    S = 2 * (N - 1)
    cap = D + 4
    pb = np.empty((cap, S), np.float64)
    cb = np.empty((cap, S), np.int8)
    ub = np.empty((cap, N), np.int8)
    met = np.empty(cap, np.float64)
    plen = np.zeros(cap, np.int32)

    occ = np.empty(cap, np.int32)       # alive slots, dense
    pos = np.empty(cap, np.int32)       # slot -> index in occ
    flist = np.empty(cap, np.int32)     # free slots
    len_count = np.zeros(N + 1, np.int32)
    cvec = np.zeros(N + 1, np.int32)
    aref = np.zeros(N + 1, np.float64)
    aset = np.zeros(N + 1, np.uint8)

    for s in range(cap):
        flist[s] = cap - 1 - s
    nfree = cap
    count = 0
    ndist = 0
    cur_min = 0

    out = np.zeros(N, np.int8)
    out_metric = 0.0
    ops = 0
    pruned = 0
    peak = 1
    status = 0
    fmode = 0

    # root: the null path
    root = flist[nfree - 1]
    nfree -= 1
    cb[root, :] = 0
    met[root] = 0.0
    plen[root] = 0
    occ[count] = root
    pos[root] = count
    count += 1
    len_count[0] = 1
    ndist = 1

    while True:
        # determination: does the top of the stack reach a leaf?
        gb = occ[0]
        for k in range(1, count):
            s = occ[k]
            if _ranks_before(met, plen, ub, s, gb):
                gb = s
        if plen[gb] == N:
            out[:] = ub[gb, :]
            out_metric = met[gb]
            break
        # popping
        if hybrid == 1 and fmode == 1:
            while cur_min <= N and len_count[cur_min] == 0:
                cur_min += 1
            pop = -1
            for k in range(count):
                s = occ[k]
                if plen[s] == cur_min:
                    if pop < 0 or _ranks_before(met, plen, ub, s, pop):
                        pop = s
        else:
            pop = gb
        ell = plen[pop]
        M = met[pop]
        k = pos[pop]
        last = occ[count - 1]
        occ[k] = last
        pos[last] = k
        count -= 1
        len_count[ell] -= 1
        if len_count[ell] == 0:
            ndist -= 1
        eligible = ell >= 1 and info_mask[ell - 1] == 1
        if eligible and aset[ell] == 1 and count > 0 and M < aref[ell] - log_tau:
            pruned += 1
            flist[nfree] = pop
            nfree += 1
            continue
        if eligible and aset[ell] == 0:
            aset[ell] = 1
            aref[ell] = M
        if ell >= 1:
            cvec[ell] += 1
        # expansion
        m0, m1, o = _sweep(ell, n, pb[pop], cb[pop], chan, poff, approx)
        ops += o
        nl = ell + 1
        if info_mask[ell] == 0:
            fb = frozen_vals[ell]
            _absorb(ell, n, cb[pop], poff, fb)
            ub[pop, ell] = fb
            plen[pop] = nl
            occ[count] = pop
            pos[pop] = count
            count += 1
            if len_count[nl] == 0:
                ndist += 1
            len_count[nl] += 1
        else:
            keep0 = True
            keep1 = True
            if aset[nl] == 1 and log_tau < np.inf:
                thr = aref[nl] - log_tau
                if m0 < thr:
                    keep0 = False
                if m1 < thr:
                    keep1 = False
            if not keep0:
                pruned += 1
            if not keep1:
                pruned += 1
            if not keep0 and not keep1 and count == 0:
                # never abandon the last line of search
                if m0 >= m1:
                    keep0 = True
                else:
                    keep1 = True
                pruned -= 1
            room = (1 if keep0 else 0) + (1 if keep1 else 0)
            if hybrid == 0:
                while count > D - room:
                    w = occ[0]
                    for k2 in range(1, count):
                        s = occ[k2]
                        if _ranks_before(met, plen, ub, w, s):
                            w = s
                    k = pos[w]
                    last = occ[count - 1]
                    occ[k] = last
                    pos[last] = k
                    count -= 1
                    len_count[plen[w]] -= 1
                    if len_count[plen[w]] == 0:
                        ndist -= 1
                    flist[nfree] = w
                    nfree += 1
            sib = -1
            if keep0 and keep1:
                sib = flist[nfree - 1]
                nfree -= 1
                pb[sib, :] = pb[pop, :]
                cb[sib, :] = cb[pop, :]
                ub[sib, :] = ub[pop, :]
            if keep0 or keep1:
                b = 0 if keep0 else 1
                _absorb(ell, n, cb[pop], poff, b)
                ub[pop, ell] = b
                plen[pop] = nl
                met[pop] = m0 if b == 0 else m1
                occ[count] = pop
                pos[pop] = count
                count += 1
                if len_count[nl] == 0:
                    ndist += 1
                len_count[nl] += 1
            else:
                flist[nfree] = pop
                nfree += 1
            if sib >= 0:
                _absorb(ell, n, cb[sib], poff, 1)
                ub[sib, ell] = 1
                plen[sib] = nl
                met[sib] = m1
                occ[count] = sib
                pos[sib] = count
                count += 1
                len_count[nl] += 1
            # eager competition: entries beyond the L - c_nl still-expandable
            # best of this length can never be popped; drop them now
            budget = L - cvec[nl]
            while len_count[nl] > budget:
                w = -1
                for k2 in range(count):
                    s = occ[k2]
                    if plen[s] == nl:
                        if w < 0 or _ranks_before(met, plen, ub, w, s):
                            w = s
                k = pos[w]
                last = occ[count - 1]
                occ[k] = last
                pos[last] = k
                count -= 1
                len_count[nl] -= 1
                if len_count[nl] == 0:
                    ndist -= 1
                flist[nfree] = w
                nfree += 1
        # competition on the popped length: once L paths of length ell were
        # expanded, everything at length <= ell is dead
        if ell >= 1 and cvec[ell] == L:
            k = count - 1
            while k >= 0:
                s = occ[k]
                if plen[s] <= ell:
                    last = occ[count - 1]
                    occ[pos[s]] = last
                    pos[last] = pos[s]
                    count -= 1
                    len_count[plen[s]] -= 1
                    if len_count[plen[s]] == 0:
                        ndist -= 1
                    flist[nfree] = s
                    nfree += 1
                k -= 1
        if hybrid == 1:
            if fmode == 1 and ndist <= 1:
                fmode = 0
            if fmode == 0 and D - count <= 2 * L - 1:
                fmode = 1
            if count > D:
                status = 1
                break
        if count > peak:
            peak = count
        if count == 0:
            status = 2
            break
    return out, out_metric, ops, pruned, cvec, peak, status
