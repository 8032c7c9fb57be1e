"""Pure-Python kernels.

The compiled module ``sociogit.kernels._speedups`` implements the same three
functions with the same algorithms; results must be bit-identical between the
two backends (property-tested), so any behavioral change here has to be
mirrored there.
"""

# Beyond this edit distance the diff degrades to one whole-region replace.
# Keeps worst-case cost O(cap * (n + m)); ordinary commits never get close.
DIFF_CAP = 1024

_BLOCK = 64


def diff_regions(a, b):
    """Minimal edit script between two sequences of line ids.

    Args:
        a: old line ids (sequence of ints)
        b: new line ids (sequence of ints)

    Returns:
        List of (i1, i2, j1, j2) tuples, ascending and non-adjacent, meaning
        a[i1:i2] was replaced by b[j1:j2]. Zero-length sides encode pure
        insertions/deletions. Empty list means the sequences are equal.
    """
    n0, m0 = len(a), len(b)
    pre = 0
    lim = n0 if n0 < m0 else m0
    while pre < lim and a[pre] == b[pre]:
        pre += 1
    suf = 0
    while suf < lim - pre and a[n0 - 1 - suf] == b[m0 - 1 - suf]:
        suf += 1
    n = n0 - suf - pre
    m = m0 - suf - pre
    if n == 0 and m == 0:
        return []
    if n == 0:
        return [(pre, pre, pre, pre + m)]
    if m == 0:
        return [(pre, pre + n, pre, pre)]
    ta = a[pre:n0 - suf]
    tb = b[pre:m0 - suf]
    edits = _myers_edits(ta, tb)
    if edits is None:
        return [(pre, pre + n, pre, pre + m)]
    return _merge_edits(edits, pre)


def _myers_edits(a, b):
    """Greedy O(ND) forward search; returns raw edit points or None at cap."""
    n, m = len(a), len(b)
    maxd = n + m
    if maxd > DIFF_CAP:
        maxd = DIFF_CAP
    width = 2 * maxd + 2
    v = [0] * width
    trace = []
    final_d = -1
    for d in range(maxd + 1):
        trace.append(v[:])
        done = False
        for k in range(-d, d + 1, 2):
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
        if done:
            final_d = d
            break
    if final_d < 0:
        return None

    # Backtrack: each non-diagonal step is one insert or delete.
    edits = []
    x, y = n, m
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
            # down move: b[prev_y] inserted after a[:prev_x]
            edits.append((1, prev_x, prev_y))
        else:
            # right move: a[prev_x] deleted
            edits.append((0, prev_x, prev_y))
        x, y = prev_x, prev_y
    edits.reverse()
    return edits


def _merge_edits(edits, shift):
    """Coalesce adjacent insert/delete points into replace regions."""
    regions = []
    i1 = i2 = j1 = j2 = -1
    for kind, x, y in edits:
        if i1 < 0:
            i1, i2, j1, j2 = x, x, y, y
        elif x != i2 or y != j2:
            regions.append((i1 + shift, i2 + shift, j1 + shift, j2 + shift))
            i1, i2, j1, j2 = x, x, y, y
        if kind == 0:
            i2 += 1
        else:
            j2 += 1
    if i1 >= 0:
        regions.append((i1 + shift, i2 + shift, j1 + shift, j2 + shift))
    return regions


def _count_blocks(data):
    counts = {}
    start = 0
    ln = len(data)
    while start < ln:
        nl = data.find(b"\n", start)
        end = ln if nl < 0 else nl + 1
        while end - start > _BLOCK:
            piece = data[start:start + _BLOCK]
            counts[piece] = counts.get(piece, 0) + _BLOCK
            start += _BLOCK
        piece = data[start:end]
        counts[piece] = counts.get(piece, 0) + (end - start)
        start = end
    return counts


def similarity_percent(a, b):
    """Content similarity of two byte strings, 0..100.

    Counts bytes in common line/64-byte blocks (multiset intersection)
    relative to the larger input, the classic rename-detection score.
    """
    if a == b:
        return 100
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0
    ca = _count_blocks(a)
    cb = _count_blocks(b)
    if len(cb) < len(ca):
        ca, cb = cb, ca
    common = 0
    for block, cnt in ca.items():
        other = cb.get(block)
        if other is not None:
            common += cnt if cnt < other else other
    return 100 * common // (la if la > lb else lb)


def apply_delta(base, delta):
    """Apply a git packfile delta to its base object payload."""
    i = 0
    base_size, i = _varint(delta, i)
    result_size, i = _varint(delta, i)
    if base_size != len(base):
        raise ValueError("delta base size mismatch")
    out = bytearray()
    ln = len(delta)
    while i < ln:
        op = delta[i]
        i += 1
        if op & 0x80:
            cp_off = 0
            cp_size = 0
            if op & 0x01:
                cp_off = delta[i]
                i += 1
            if op & 0x02:
                cp_off |= delta[i] << 8
                i += 1
            if op & 0x04:
                cp_off |= delta[i] << 16
                i += 1
            if op & 0x08:
                cp_off |= delta[i] << 24
                i += 1
            if op & 0x10:
                cp_size = delta[i]
                i += 1
            if op & 0x20:
                cp_size |= delta[i] << 8
                i += 1
            if op & 0x40:
                cp_size |= delta[i] << 16
                i += 1
            if cp_size == 0:
                cp_size = 0x10000
            if cp_off + cp_size > len(base):
                raise ValueError("delta copy out of range")
            out += base[cp_off:cp_off + cp_size]
        elif op:
            out += delta[i:i + op]
            i += op
        else:
            raise ValueError("invalid delta opcode 0")
    if len(out) != result_size:
        raise ValueError("delta result size mismatch")
    return bytes(out)


def _varint(data, i):
    value = 0
    shift = 0
    while True:
        byte = data[i]
        i += 1
        value |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            return value, i
