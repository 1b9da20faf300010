"""Shared fixtures: reference machines, encoded example streams, independent
brute-force oracles, and a scriptable system stand-in.

The oracles here deliberately re-derive everything from first principles
(word enumeration, stream counting) so the tests never trust the code paths
they are checking.
"""

import numpy as np

from caal.mealy import MealyMachine, Observation, decode_word, encode_word, run_word

AB = ("a", "b")


def obs(inputs_str, outputs_str, in_table=AB, out_table=AB):
    """Encode an observation given as two symbol strings."""
    return Observation(encode_word(in_table, inputs_str), encode_word(out_table, outputs_str))


def make_toggle():
    """Two states over {a}: q0 -a/x-> q1, q1 -a/y-> q0."""
    return MealyMachine(0, ("a",), ("x", "y"), [[1], [0]], [[0], [1]])


def example1_stream():
    """The three observations of the worked example: (aaa,aab), (aab,aaa), (ab,ab)."""
    return [obs("aaa", "aab"), obs("aab", "aaa"), obs("ab", "ab")]


def example1_update():
    """The later observation (aaa,abb) that conflicts with the stream above."""
    return obs("aaa", "abb")


def example1_machine():
    """The left example tree read as a machine, completed with a sink state
    so the total-machine invariant holds; outputs on the stored paths are
    unchanged."""
    # nodes: 0=root, 1=a, 2=aa, 3=aaa, 4=aab, 5=ab, 6=sink
    inputs = AB
    outputs = ("a", "b", "-")
    n = 7
    trans = np.full((n, 2), 6, dtype=np.int64)
    outf = np.full((n, 2), 2, dtype=np.int64)
    a, b = 0, 1
    for src, sym, dst, out in [
        (0, a, 1, "a"),
        (1, a, 2, "a"),
        (1, b, 5, "b"),
        (2, a, 3, "b"),
        (2, b, 4, "a"),
    ]:
        trans[src, sym] = dst
        outf[src, sym] = outputs.index(out)
    return MealyMachine(0, inputs, outputs, trans, outf)


# --- independent oracles -------------------------------------------------


def oracle_conflicts(o1: Observation, o2: Observation) -> bool:
    """Re-derived conflict predicate: some shared input prefix on which the
    output words disagree."""
    limit = 0
    for x, y in zip(o1.inputs, o2.inputs):
        if x != y:
            break
        limit += 1
    return any(o1.outputs[k] != o2.outputs[k] for k in range(limit))


def oracle_prefixes(o: Observation):
    return {Observation(o.inputs[:n], o.outputs[:n]) for n in range(len(o.inputs) + 1)}


def oracle_most_recent_language(stream):
    """Brute-force stored language after replaying `stream` under the
    keep-the-freshest rule: prefixes of every observation that no later
    observation conflicts with."""
    keep = {Observation((), ())}
    for k, o in enumerate(stream):
        if any(oracle_conflicts(o, later) for later in stream[k + 1:]):
            continue
        keep |= oracle_prefixes(o)
    return keep


def oracle_most_frequent_winner(outputs_list):
    """Counting oracle for fixed-input streams: resolve the winning output
    word position by position, keeping the most frequent next symbol among
    the observations that still match the winner prefix, ties to the latest
    occurrence."""
    assert len({len(o) for o in outputs_list}) == 1
    length = len(outputs_list[0])
    alive = list(enumerate(outputs_list))
    prefix = ()
    for pos in range(length):
        counts, last = {}, {}
        for idx, word in alive:
            sym = word[pos]
            counts[sym] = counts.get(sym, 0) + 1
            last[sym] = idx
        best = max(counts, key=lambda s: (counts[s], last[s]))
        prefix += (best,)
        alive = [(i, w) for i, w in alive if w[pos] == best]
    return prefix


def oracle_equivalence_witness(m1, m2, max_len):
    """Word enumeration, shortest first and lexicographic over the sorted
    input alphabet within a length: the first input word (over m1's indices)
    on which the machines emit different symbol words, or None."""
    order = sorted(range(len(m1.inputs)), key=lambda i: m1.inputs[i])
    to2 = [m2.inputs.index(s) for s in m1.inputs]
    layer = [()]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for sym in order:
                w2 = w + (sym,)
                o1 = decode_word(m1.outputs, run_word(m1, w2))
                o2 = decode_word(m2.outputs, run_word(m2, tuple(to2[x] for x in w2)))
                if o1 != o2:
                    return w2
                nxt.append(w2)
        layer = nxt
    return None


# --- scripted system ------------------------------------------------------


class _TargetShim:
    def __init__(self, inputs, outputs):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.n_inputs = len(self.inputs)


class ScriptedSystem:
    """A SystemHandle stand-in whose answers come from a callable
    (word, call_index) -> output word; counts tests/resets/symbols the same
    way the real handle does."""

    def __init__(self, inputs, outputs, answer_fn, symbol_budget=None):
        self.target = _TargetShim(inputs, outputs)
        self._answer = answer_fn
        self.symbol_budget = symbol_budget
        self.tests = 0
        self.resets = 0
        self.symbols = 0

    def execute(self, word):
        from caal.sul import BudgetExhausted

        if self.symbol_budget is not None and self.symbols >= self.symbol_budget:
            raise BudgetExhausted("scripted budget exhausted")
        word = tuple(word)
        out = tuple(self._answer(word, self.tests))
        assert len(out) == len(word)
        self.tests += 1
        self.resets += 1
        self.symbols += len(word)
        return Observation(word, out)


def random_stream(rng, n_obs_max=8, len_max=5, n_inputs=2, n_outputs=2):
    """A random observation stream for the tree property tests."""
    stream = []
    for _ in range(int(rng.integers(1, n_obs_max + 1))):
        length = int(rng.integers(1, len_max + 1))
        iw = tuple(int(x) for x in rng.integers(0, n_inputs, size=length))
        ow = tuple(int(x) for x in rng.integers(0, n_outputs, size=length))
        stream.append(Observation(iw, ow))
    return stream
