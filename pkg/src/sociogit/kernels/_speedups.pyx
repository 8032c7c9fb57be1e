# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors sociogit.kernels._fallback bit for bit."""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

DIFF_CAP = 1024

cdef int _DIFF_CAP = 1024
cdef int _BLOCK = 64


def diff_regions(a, b):
    """See sociogit.kernels._fallback.diff_regions."""
    cdef Py_ssize_t n0 = len(a)
    cdef Py_ssize_t m0 = len(b)
    cdef int *ca = NULL
    cdef int *cb = NULL
    cdef Py_ssize_t i
    cdef Py_ssize_t pre, suf, lim, n, m
    try:
        ca = <int *> malloc((n0 + 1) * sizeof(int))
        cb = <int *> malloc((m0 + 1) * sizeof(int))
        if ca == NULL or cb == NULL:
            raise MemoryError()
        for i in range(n0):
            ca[i] = a[i]
        for i in range(m0):
            cb[i] = b[i]

        pre = 0
        lim = n0 if n0 < m0 else m0
        while pre < lim and ca[pre] == cb[pre]:
            pre += 1
        suf = 0
        while suf < lim - pre and ca[n0 - 1 - suf] == cb[m0 - 1 - suf]:
            suf += 1
        n = n0 - suf - pre
        m = m0 - suf - pre
        if n == 0 and m == 0:
            return []
        if n == 0:
            return [(pre, pre, pre, pre + m)]
        if m == 0:
            return [(pre, pre + n, pre, pre)]
        return _myers(ca + pre, cb + pre, n, m, pre)
    finally:
        if ca != NULL:
            free(ca)
        if cb != NULL:
            free(cb)


cdef list _myers(int *a, int *b, Py_ssize_t n, Py_ssize_t m, Py_ssize_t shift):
    cdef Py_ssize_t maxd = n + m
    if maxd > _DIFF_CAP:
        maxd = _DIFF_CAP
    cdef Py_ssize_t width = 2 * maxd + 2
    cdef Py_ssize_t *v = NULL
    cdef Py_ssize_t **trace = NULL
    cdef Py_ssize_t d, k, x, y, prev_k, prev_x, prev_y, final_d, rows
    cdef Py_ssize_t *pv
    cdef bint done
    cdef list regions
    cdef Py_ssize_t i1, i2, j1, j2, ex, ey
    cdef int kind

    v = <Py_ssize_t *> malloc(width * sizeof(Py_ssize_t))
    trace = <Py_ssize_t **> malloc((maxd + 1) * sizeof(Py_ssize_t *))
    if v == NULL or trace == NULL:
        if v != NULL:
            free(v)
        if trace != NULL:
            free(trace)
        raise MemoryError()
    for d in range(width):
        v[d] = 0
    rows = 0
    final_d = -1
    try:
        for d in range(maxd + 1):
            pv = <Py_ssize_t *> malloc(width * sizeof(Py_ssize_t))
            if pv == NULL:
                raise MemoryError()
            memcpy(pv, v, width * sizeof(Py_ssize_t))
            trace[rows] = pv
            rows += 1
            done = False
            k = -d
            while k <= d:
                if k == -d or (k != d and v[k - 1 + maxd] < v[k + 1 + maxd]):
                    x = v[k + 1 + maxd]
                else:
                    x = v[k - 1 + maxd] + 1
                y = x - k
                while x < n and y < m and a[x] == b[y]:
                    x += 1
                    y += 1
                v[k + maxd] = x
                if x >= n and y >= m:
                    done = True
                    break
                k += 2
            if done:
                final_d = d
                break
        if final_d < 0:
            return [(shift, shift + n, shift, shift + m)]

        # Backtrack, merging adjacent edit points into regions on the fly
        # (walked newest-first, so regions come out descending; reverse at end).
        regions = []
        x = n
        y = m
        i1 = -1
        i2 = j1 = j2 = 0
        for d in range(final_d, 0, -1):
            pv = trace[d]
            k = x - y
            if k == -d or (k != d and pv[k - 1 + maxd] < pv[k + 1 + maxd]):
                prev_k = k + 1
            else:
                prev_k = k - 1
            prev_x = pv[prev_k + maxd]
            prev_y = prev_x - prev_k
            if prev_k == k + 1:
                kind = 1
                ex = prev_x
                ey = prev_y
            else:
                kind = 0
                ex = prev_x
                ey = prev_y
            # Walking backwards: an edit at (ex, ey) belongs to the current
            # region iff the region currently starts exactly at the edit's end.
            if kind == 0:
                if i1 == ex + 1 and j1 == ey:
                    i1 = ex
                else:
                    if i1 >= 0:
                        regions.append((i1 + shift, i2 + shift, j1 + shift, j2 + shift))
                    i1 = ex
                    i2 = ex + 1
                    j1 = ey
                    j2 = ey
            else:
                if i1 == ex and j1 == ey + 1:
                    j1 = ey
                else:
                    if i1 >= 0:
                        regions.append((i1 + shift, i2 + shift, j1 + shift, j2 + shift))
                    i1 = ex
                    i2 = ex
                    j1 = ey
                    j2 = ey + 1
            x = prev_x
            y = prev_y
        if i1 >= 0:
            regions.append((i1 + shift, i2 + shift, j1 + shift, j2 + shift))
        regions.reverse()
        return regions
    finally:
        for d in range(rows):
            free(trace[d])
        free(trace)
        free(v)


cdef dict _count_blocks(const unsigned char[::1] data):
    cdef dict counts = {}
    cdef Py_ssize_t start = 0
    cdef Py_ssize_t ln = data.shape[0]
    cdef Py_ssize_t end, pos
    cdef bytes piece
    cdef object cur
    while start < ln:
        pos = start
        end = -1
        while pos < ln:
            if data[pos] == 0x0A:
                end = pos + 1
                break
            pos += 1
        if end < 0:
            end = ln
        while end - start > _BLOCK:
            piece = bytes(data[start:start + _BLOCK])
            cur = counts.get(piece)
            counts[piece] = _BLOCK if cur is None else (<Py_ssize_t> cur) + _BLOCK
            start += _BLOCK
        piece = bytes(data[start:end])
        cur = counts.get(piece)
        counts[piece] = (end - start) if cur is None else (<Py_ssize_t> cur) + (end - start)
        start = end
    return counts


def similarity_percent(bytes a, bytes b):
    """See sociogit.kernels._fallback.similarity_percent."""
    if a == b:
        return 100
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    if la == 0 or lb == 0:
        return 0
    cdef dict ca = _count_blocks(a)
    cdef dict cb = _count_blocks(b)
    if len(cb) < len(ca):
        ca, cb = cb, ca
    cdef Py_ssize_t common = 0
    cdef Py_ssize_t cnt, other
    cdef object block, oth
    for block, c in ca.items():
        oth = cb.get(block)
        if oth is not None:
            cnt = <Py_ssize_t> c
            other = <Py_ssize_t> oth
            common += cnt if cnt < other else other
    return 100 * common // (la if la > lb else lb)


def apply_delta(bytes base, bytes delta):
    """See sociogit.kernels._fallback.apply_delta."""
    cdef const unsigned char *d = delta
    cdef const unsigned char *bs = base
    cdef Py_ssize_t ln = len(delta)
    cdef Py_ssize_t base_len = len(base)
    cdef Py_ssize_t i = 0
    cdef unsigned long long base_size = 0, result_size = 0
    cdef int shift
    cdef unsigned char byte, op
    cdef Py_ssize_t cp_off, cp_size

    shift = 0
    while True:
        byte = d[i]
        i += 1
        base_size |= (<unsigned long long> (byte & 0x7F)) << shift
        shift += 7
        if not byte & 0x80:
            break
    shift = 0
    while True:
        byte = d[i]
        i += 1
        result_size |= (<unsigned long long> (byte & 0x7F)) << shift
        shift += 7
        if not byte & 0x80:
            break
    if <Py_ssize_t> base_size != base_len:
        raise ValueError("delta base size mismatch")

    cdef bytearray out = bytearray()
    while i < ln:
        op = d[i]
        i += 1
        if op & 0x80:
            cp_off = 0
            cp_size = 0
            if op & 0x01:
                cp_off = d[i]
                i += 1
            if op & 0x02:
                cp_off |= (<Py_ssize_t> d[i]) << 8
                i += 1
            if op & 0x04:
                cp_off |= (<Py_ssize_t> d[i]) << 16
                i += 1
            if op & 0x08:
                cp_off |= (<Py_ssize_t> d[i]) << 24
                i += 1
            if op & 0x10:
                cp_size = d[i]
                i += 1
            if op & 0x20:
                cp_size |= (<Py_ssize_t> d[i]) << 8
                i += 1
            if op & 0x40:
                cp_size |= (<Py_ssize_t> d[i]) << 16
                i += 1
            if cp_size == 0:
                cp_size = 0x10000
            if cp_off + cp_size > base_len:
                raise ValueError("delta copy out of range")
            out += base[cp_off:cp_off + cp_size]
        elif op:
            out += delta[i:i + op]
            i += op
        else:
            raise ValueError("invalid delta opcode 0")
    if len(out) != <Py_ssize_t> result_size:
        raise ValueError("delta result size mismatch")
    return bytes(out)
