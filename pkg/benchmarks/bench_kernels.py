#!/usr/bin/env python3
"""Throughput comparison of the JIT-compiled walks against the plain-Python
fallbacks (the path CAAL_NO_NUMBA=1 selects).

Usage: python benchmarks/bench_kernels.py [--symbols N]
"""

import argparse
import time

import numpy as np

from caal import kernels


def bench(fn, trans, outf, words, noisy):
    out = np.empty(words.shape[1], dtype=np.int64)
    if noisy:
        rng = np.random.default_rng(0)
        corrupt = rng.random(words.shape) < 0.1
        repl = rng.integers(0, trans.shape[1], size=words.shape)
        fn(trans, outf, 0, words[0], corrupt[0], repl[0], kernels.NOISE_OUTPUT, out)  # warm-up
        start = time.perf_counter()
        for i in range(words.shape[0]):
            fn(trans, outf, 0, words[i], corrupt[i], repl[i], kernels.NOISE_OUTPUT, out)
    else:
        fn(trans, outf, 0, words[0], out)  # warm-up
        start = time.perf_counter()
        for i in range(words.shape[0]):
            fn(trans, outf, 0, words[i], out)
    elapsed = time.perf_counter() - start
    return words.size / elapsed


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--symbols", type=int, default=2_000_000)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    n, k, word_len = 20, 4, 20
    trans = rng.integers(0, n, size=(n, k))
    outf = rng.integers(0, 3, size=(n, k))
    words = rng.integers(0, k, size=(args.symbols // word_len, word_len))

    rows = []
    for label, fn_jit, fn_py, noisy in [
        ("clean walk", kernels.walk_outputs, kernels.walk_outputs_py, False),
        ("noisy walk", kernels.walk_noisy, kernels.walk_noisy_py, True),
    ]:
        py = bench(fn_py, trans, outf, words, noisy)
        jit = bench(fn_jit, trans, outf, words, noisy) if kernels.NUMBA_ENABLED else py
        rows.append((label, py, jit))

    print(f"numba enabled: {kernels.NUMBA_ENABLED}")
    print(f"{'kernel':<12} {'python (sym/s)':>16} {'jit (sym/s)':>16} {'speedup':>9}")
    for label, py, jit in rows:
        print(f"{label:<12} {py:>16,.0f} {jit:>16,.0f} {jit / py:>8.1f}x")


if __name__ == "__main__":
    main()
