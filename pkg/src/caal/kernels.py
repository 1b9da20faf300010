"""Hot inner loops for running words through transition tables.

Per-symbol machine stepping dominates the benchmark runtime (every test is
re-executed `repeats` times through the noise channel), so these walks are
JIT-compiled with numba when it is available.  Set ``CAAL_NO_NUMBA=1`` to
force the plain-Python fallbacks; both paths consume randomness drawn by
the caller and produce bit-identical results.

``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os

NOISE_NONE = 0
NOISE_INPUT = 1
NOISE_OUTPUT = 2


def _walk_outputs(trans, outf, start, word, out):
    s = start
    for t in range(word.shape[0]):
        a = word[t]
        out[t] = outf[s, a]
        s = trans[s, a]
    return s


def _walk_noisy(trans, outf, start, word, corrupt, repl, kind, out):
    # Input noise perturbs the symbol fed to the machine (the caller still
    # reports the intended word); output noise perturbs only what is seen.
    s = start
    for t in range(word.shape[0]):
        a = word[t]
        if kind == NOISE_INPUT and corrupt[t]:
            a = repl[t]
        o = outf[s, a]
        if kind == NOISE_OUTPUT and corrupt[t]:
            o = repl[t]
        out[t] = o
        s = trans[s, a]
    return s


walk_outputs_py = _walk_outputs
walk_noisy_py = _walk_noisy

NUMBA_ENABLED = os.environ.get("CAAL_NO_NUMBA", "").strip().lower() not in ("1", "true", "yes")
if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    walk_outputs = njit(cache=True)(_walk_outputs)
    walk_noisy = njit(cache=True)(_walk_noisy)
else:
    walk_outputs = walk_outputs_py
    walk_noisy = walk_noisy_py
