"""Compare the compiled and pure-Python window-counting kernels.

    python3 benchmarks/bench_kernels.py --tokens 200000 --repeat 3
"""
import argparse
import time

import numpy as np

from seqassoc import _kernels_py

try:
    from seqassoc import _kernels as compiled
except ImportError:
    compiled = None


def make_chunk(n_tokens, n_units, tagged, seed):
    rng = np.random.default_rng(seed)
    # Zipf-like unit ids, a fifth of tokens dropped below the unit threshold
    lex = np.minimum(rng.zipf(1.3, n_tokens) - 1, n_units - 1).astype(np.int32)
    lex[rng.random(n_tokens) < 0.2] = -1
    if tagged:
        pos = rng.integers(n_units, n_units + 16, n_tokens).astype(np.int32)
    else:
        pos = np.full(n_tokens, -1, dtype=np.int32)
    starts = np.arange(0, n_tokens + 1, 40, dtype=np.int64)
    if starts[-1] != n_tokens:
        starts = np.append(starts, n_tokens)
    return lex, pos, starts


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tokens", type=int, default=100_000)
    ap.add_argument("--units", type=int, default=5_000)
    ap.add_argument("--max-length", type=int, default=5)
    ap.add_argument("--min-count", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    print(f"{'corpus':<10} {'backend':<8} {'seconds':>9} {'tokens/s':>12} {'speedup':>8}")
    for tagged in (False, True):
        chunk = make_chunk(args.tokens, args.units, tagged, seed=0)
        call = (*chunk, args.max_length, args.min_count)
        label = "tagged" if tagged else "plain"
        t_py, ref = best_of(lambda: _kernels_py.count_chunk(*call), args.repeat)
        print(f"{label:<10} {'python':<8} {t_py:9.3f} {args.tokens / t_py:12,.0f} {1.0:8.1f}")
        if compiled is None:
            print(f"{label:<10} {'cython':<8} {'not built':>9}")
            continue
        t_cy, got = best_of(lambda: compiled.count_chunk(*call), args.repeat)
        if got != ref:
            raise SystemExit("backends disagree")
        print(f"{label:<10} {'cython':<8} {t_cy:9.3f} {args.tokens / t_cy:12,.0f} {t_py / t_cy:8.1f}")


if __name__ == "__main__":
    main()
