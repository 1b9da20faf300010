"""Simulated system under learning: a hidden Mealy machine behind
input/output noise channels, with mid-run mutation, per-symbol cost
accounting, and the majority-voting repeats channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .mealy import MealyMachine, Observation, decode_word


class NoiseKind(Enum):
    NONE = "none"
    INPUT = "input"
    OUTPUT = "output"


_KIND_CODE = {
    NoiseKind.NONE: kernels.NOISE_NONE,
    NoiseKind.INPUT: kernels.NOISE_INPUT,
    NoiseKind.OUTPUT: kernels.NOISE_OUTPUT,
}


@dataclass(frozen=True)
class NoiseSpec:
    """Per-symbol perturbation: with probability `level` a symbol is replaced
    by a uniform draw over the full alphabet (so the effective corruption
    rate is level * (|A|-1) / |A|)."""

    kind: NoiseKind = NoiseKind.NONE
    level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.level <= 1.0:
            raise ValueError("noise level must lie in [0, 1]")

    @staticmethod
    def none():
        return NoiseSpec(NoiseKind.NONE, 0.0, 0)


@dataclass(frozen=True)
class RepeatsPolicy:
    """Majority voting parameters: run `min_repeats` times, return early once
    a full output word holds at least `agreement` of the answers, otherwise
    keep sampling one at a time up to `max_repeats` and take the plurality."""

    min_repeats: int = 1
    max_repeats: int = 1
    agreement: float = 0.8

    def __post_init__(self):
        if not 1 <= self.min_repeats <= self.max_repeats:
            raise ValueError("need 1 <= min_repeats <= max_repeats")
        if not 0.5 < self.agreement <= 1.0:
            raise ValueError("agreement threshold must lie in (0.5, 1]")


class BudgetExhausted(RuntimeError):
    """The symbol budget ran out; the run ends with a timeout outcome."""


class SystemHandle:
    """Executes tests on the hidden target through the noise channel.

    `mutations` is a list of (test_index, machine) pairs: from the execute
    call with that 0-based index onward, the replacement machine answers.
    Counters are monotone; `symbols` grows by len(word) per execute call and
    resets are counted but excluded from the symbol budget.
    """

    def __init__(self, target: MealyMachine, noise: NoiseSpec | None = None,
                 mutations=None, symbol_budget: int | None = None):
        self.noise = noise or NoiseSpec.none()
        self.symbol_budget = symbol_budget
        self.tests = 0
        self.resets = 0
        self.symbols = 0
        self._rng = np.random.default_rng(self.noise.seed)
        self._scratch = {}
        self._pending = sorted(mutations or [], key=lambda m: m[0])
        for _, machine in self._pending:
            if machine.inputs != target.inputs or machine.outputs != target.outputs:
                raise ValueError("mutated machine must keep the target's alphabets")
        self._install(target)

    def _install(self, machine: MealyMachine):
        self.target = machine
        self._trans = machine.transitions
        self._outf = machine.output_fun
        self._kind = _KIND_CODE[self.noise.kind]
        self._n_repl = machine.n_inputs if self.noise.kind is NoiseKind.INPUT else len(machine.outputs)

    def execute(self, word) -> Observation:
        """One reset + one run of `word`; returns the *intended* input word
        paired with the (possibly perturbed) observed output word."""
        w = np.asarray(word, dtype=np.int64)
        if w.size and (w.min() < 0 or w.max() >= self.target.n_inputs):
            raise ValueError("input symbol outside the target's input alphabet")
        out = self._execute_array(w)
        return Observation(tuple(int(a) for a in w), tuple(int(o) for o in out))

    def _execute_array(self, w):
        # hot path shared with the repeats channel: `w` is already a
        # validated int64 array; returns a scratch output array (valid until
        # the next call)
        if self.symbol_budget is not None and self.symbols >= self.symbol_budget:
            raise BudgetExhausted(f"symbol budget of {self.symbol_budget} exhausted")
        while self._pending and self.tests >= self._pending[0][0]:
            self._install(self._pending.pop(0)[1])
        self.tests += 1
        self.resets += 1
        self.symbols += w.size
        out = self._scratch.get(w.size)
        if out is None:
            out = self._scratch[w.size] = np.empty(w.size, dtype=np.int64)
        if self._kind == kernels.NOISE_NONE:
            kernels.walk_outputs(self._trans, self._outf, self.target.initial, w, out)
        else:
            draws = self._rng.random(2 * w.size)
            corrupt = draws[: w.size] < self.noise.level
            repl = (draws[w.size:] * self._n_repl).astype(np.int64)
            kernels.walk_noisy(self._trans, self._outf, self.target.initial, w,
                               corrupt, repl, self._kind, out)
        return out


def execute_repeated(system: SystemHandle, word, policy: RepeatsPolicy) -> Observation:
    """The repeats channel: majority-vote full output words.

    Runs `min_repeats` executions, returns as soon as one output word holds
    at least the agreement share of all answers so far, else keeps executing
    one at a time until agreement or `max_repeats`; then the plurality wins,
    ties going to the lexicographically least output word (by symbols)."""
    word = tuple(word)
    if isinstance(system, SystemHandle):
        w = np.asarray(word, dtype=np.int64)
        if w.size and (w.min() < 0 or w.max() >= system.target.n_inputs):
            raise ValueError("input symbol outside the target's input alphabet")

        def run_once():
            # answers are counted as raw bytes, decoded once for the winner
            return system._execute_array(w).tobytes()

        def to_word(key):
            return tuple(int(x) for x in np.frombuffer(key, dtype=np.int64))
    else:
        def run_once():
            return system.execute(word).outputs

        def to_word(key):
            return key

    counts: dict = {}
    total = 0
    for _ in range(policy.min_repeats):
        key = run_once()
        counts[key] = counts.get(key, 0) + 1
        total += 1
    outputs = system.target.outputs
    while True:
        best = max(counts.items(), key=lambda kv: kv[1])
        if best[1] / total >= policy.agreement:
            return Observation(word, to_word(best[0]))
        if total >= policy.max_repeats:
            winner = min(counts.items(),
                         key=lambda kv: (-kv[1], decode_word(outputs, to_word(kv[0]))))
            return Observation(word, to_word(winner[0]))
        key = run_once()
        counts[key] = counts.get(key, 0) + 1
        total += 1
