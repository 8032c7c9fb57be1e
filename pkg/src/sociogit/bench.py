"""Benchmark the compiled kernels against the pure-Python fallback.

Run as `python -m sociogit.bench`. Workloads are seeded so both backends see
identical inputs; results are also cross-checked for equality.
"""

import argparse
import random
import time

from sociogit.kernels import _fallback

try:
    from sociogit.kernels import _speedups
except ImportError:
    _speedups = None


def _make_diff_case(rng, n_lines, n_edits):
    a = list(range(n_lines))
    b = list(a)
    for _ in range(n_edits):
        pos = rng.randrange(max(1, len(b)))
        action = rng.randrange(3)
        if action == 0 and b:
            b[pos % len(b)] = n_lines + rng.randrange(10 ** 6)
        elif action == 1:
            b.insert(pos, n_lines + rng.randrange(10 ** 6))
        elif b:
            del b[pos % len(b)]
    return a, b


def _make_blob(rng, n_lines):
    return b"".join(
        b"line %d %08x\n" % (i, rng.getrandbits(32)) for i in range(n_lines)
    )


def _make_delta(rng, base):
    out = bytearray()
    result = bytearray()
    for _ in range(200):
        if rng.random() < 0.7 and len(base) > 64:
            off = rng.randrange(len(base) - 64)
            size = rng.randrange(1, 64)
            op = 0x80 | 0x01 | 0x02 | 0x10
            out.extend([op, off & 0xFF, (off >> 8) & 0xFF, size])
            result.extend(base[off:off + size])
        else:
            lit = bytes([rng.randrange(1, 256) for _ in range(rng.randrange(1, 30))])
            out.append(len(lit))
            out.extend(lit)
            result.extend(lit)

    def varint(n):
        enc = bytearray()
        while True:
            byte = n & 0x7F
            n >>= 7
            if n:
                enc.append(byte | 0x80)
            else:
                enc.append(byte)
                return bytes(enc)

    return varint(len(base)) + varint(len(result)) + bytes(out), bytes(result)


def _time(func, args_list, repeat):
    best = None
    for _ in range(repeat):
        start = time.perf_counter()
        for args in args_list:
            func(*args)
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repetitions, best-of (default 3)")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    rng = random.Random(args.seed)

    cases = {
        "diff 200 lines": [_make_diff_case(rng, 200, 8) for _ in range(300)],
        "diff 2000 lines": [_make_diff_case(rng, 2000, 25) for _ in range(40)],
        "similarity 40KB": [
            (_make_blob(rng, 2000), _make_blob(rng, 2000)) for _ in range(40)
        ],
    }
    delta_cases = []
    for _ in range(300):
        base = _make_blob(rng, 500)
        delta, _expected = _make_delta(rng, base)
        delta_cases.append((base, delta))
    cases["apply_delta"] = delta_cases

    funcs = {
        "diff 200 lines": "diff_regions",
        "diff 2000 lines": "diff_regions",
        "similarity 40KB": "similarity_percent",
        "apply_delta": "apply_delta",
    }

    if _speedups is None:
        print("compiled backend not available; showing pure-Python timings only")
    header = f"{'workload':<18} {'python':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, case_list in cases.items():
        func_name = funcs[name]
        py_func = getattr(_fallback, func_name)
        py_time = _time(py_func, case_list, args.repeat)
        if _speedups is not None:
            c_func = getattr(_speedups, func_name)
            for case in case_list[:10]:
                if py_func(*case) != c_func(*case):
                    raise AssertionError(f"backend mismatch on {name}")
            c_time = _time(c_func, case_list, args.repeat)
            ratio = py_time / c_time if c_time > 0 else float("inf")
            print(f"{name:<18} {py_time * 1000:>8.1f}ms {c_time * 1000:>8.1f}ms "
                  f"{ratio:>7.1f}x")
        else:
            print(f"{name:<18} {py_time * 1000:>8.1f}ms {'-':>10} {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
