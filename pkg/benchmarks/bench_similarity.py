"""Benchmark the edit-distance kernel backends.

Times the jitted kernel (when available) against the pure-numpy fallback on
randomly generated span-like strings, and checks they agree on every pair.

Usage: python3 benchmarks/bench_similarity.py [--pairs 2000] [--max-len 80]
"""

import argparse
import random
import statistics
import time

import numpy as np

from propwb import _levenshtein as lev


def make_pairs(n_pairs, max_len, seed=0):
    rng = random.Random(seed)
    words = ["the", "homeland", "stands", "united", "against", "outsiders",
             "friend", "true", "slogan", "fear", "doubt", "voice"]
    pairs = []
    for _ in range(n_pairs):
        a = " ".join(rng.choices(words, k=rng.randint(1, max_len // 6 or 1)))
        b = " ".join(rng.choices(words, k=rng.randint(1, max_len // 6 or 1)))
        pairs.append((a[:max_len], b[:max_len]))
    return pairs


def encode(s):
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.int32)


def bench(fn, pairs, repeats=3):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for a, b in pairs:
            fn(a, b)
        times.append(time.perf_counter() - start)
    return min(times), statistics.fmean(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--max-len", type=int, default=80)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.max_len)
    encoded = [(encode(a), encode(b)) for a, b in pairs]

    def numpy_fn(a, b):
        return lev._levenshtein_numpy(encode(a), encode(b))

    candidates = [("numpy", numpy_fn)]
    if lev.backend() == "numba":
        def numba_fn(a, b):
            return lev._levenshtein_jit(encode(a), encode(b))
        numba_fn(*pairs[0])  # trigger compilation outside the timed region
        candidates.append(("numba", numba_fn))
        mismatches = sum(1 for (ea, eb) in encoded
                         if lev._levenshtein_jit(ea, eb) != lev._levenshtein_numpy(ea, eb))
        print(f"backend agreement: {len(encoded) - mismatches}/{len(encoded)} pairs")
        if mismatches:
            raise SystemExit("backends disagree; benchmark aborted")
    else:
        print("numba unavailable or disabled (PROPWB_NO_NUMBA); timing numpy only")

    print(f"{args.pairs} pairs, max length {args.max_len}")
    results = {}
    for name, fn in candidates:
        best, mean = bench(fn, pairs)
        results[name] = best
        rate = args.pairs / best
        print(f"{name:>6}: best {best * 1e3:8.2f} ms  mean {mean * 1e3:8.2f} ms"
              f"  ({rate:,.0f} pairs/s)")
    if len(results) == 2:
        print(f"speedup (numba vs numpy): {results['numpy'] / results['numba']:.1f}x")


if __name__ == "__main__":
    main()
