"""Complete deterministic Mealy machines and their word semantics.

States are dense integers and the alphabets are explicit ordered symbol
tables, so words travel through the code as tuples of symbol indices.
Machines are immutable after construction and safe to share.
"""

from __future__ import annotations

import re
from collections import deque
from typing import NamedTuple, Optional

import numpy as np

from . import kernels

Word = tuple  # tuple of symbol indices


class Observation(NamedTuple):
    """An input word paired with the output word it produced (equal length)."""

    inputs: Word
    outputs: Word


class DotParseError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GenerationError(RuntimeError):
    pass


class MealyMachine:
    """A complete deterministic transducer over fixed input/output alphabets.

    `transitions` and `output_fun` are dense ``(n_states, n_inputs)`` integer
    tables, which makes completeness structural: every (state, input) pair
    has exactly one entry.
    """

    __slots__ = ("initial", "inputs", "outputs", "transitions", "output_fun")

    def __init__(self, initial, inputs, outputs, transitions, output_fun):
        inputs = tuple(inputs)
        outputs = tuple(outputs)
        if not inputs or not outputs:
            raise ValueError("alphabets must be non-empty")
        if len(set(inputs)) != len(inputs) or len(set(outputs)) != len(outputs):
            raise ValueError("alphabets must be duplicate-free")
        trans = np.array(transitions, dtype=np.int64)
        outf = np.array(output_fun, dtype=np.int64)
        if trans.ndim != 2 or trans.shape != outf.shape or trans.shape[1] != len(inputs):
            raise ValueError("transition/output tables must be shaped (n_states, n_inputs)")
        n = trans.shape[0]
        if n < 1:
            raise ValueError("a machine needs at least one state")
        if not 0 <= int(initial) < n:
            raise ValueError("initial state outside the state set")
        if trans.min() < 0 or trans.max() >= n:
            raise ValueError("transition target outside the state set")
        if outf.min() < 0 or outf.max() >= len(outputs):
            raise ValueError("output entry outside the output alphabet")
        trans.setflags(write=False)
        outf.setflags(write=False)
        self.initial = int(initial)
        self.inputs = inputs
        self.outputs = outputs
        self.transitions = trans
        self.output_fun = outf

    @property
    def n_states(self) -> int:
        return self.transitions.shape[0]

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    def step(self, state: int, symbol: int):
        """One transition: (next state, output index)."""
        return int(self.transitions[state, symbol]), int(self.output_fun[state, symbol])

    def __repr__(self):
        return f"MealyMachine(states={self.n_states}, inputs={self.inputs}, outputs={self.outputs})"


def encode_word(table, symbols) -> Word:
    """Translate an iterable of symbols into an index word over `table`."""
    index = {s: i for i, s in enumerate(table)}
    try:
        return tuple(index[s] for s in symbols)
    except KeyError as exc:
        raise ValueError(f"symbol {exc.args[0]!r} not in alphabet {table}") from None


def decode_word(table, word) -> tuple:
    """Translate an index word back into its symbols."""
    return tuple(table[a] for a in word)


def run_word(machine: MealyMachine, word) -> Word:
    """Outputs collected along the unique run of `word` from the initial state."""
    return run_from(machine, machine.initial, word)


def run_from(machine: MealyMachine, state: int, word) -> Word:
    """Outputs collected along the run of `word` starting at `state`."""
    w = np.asarray(word, dtype=np.int64)
    if w.ndim != 1:
        raise ValueError("a word must be a flat sequence of symbol indices")
    if w.size and (w.min() < 0 or w.max() >= machine.n_inputs):
        raise ValueError("input symbol outside the machine's input alphabet")
    out = np.empty(w.size, dtype=np.int64)
    kernels.walk_outputs(machine.transitions, machine.output_fun, state, w, out)
    return tuple(int(x) for x in out)


def _sorted_input_order(machine: MealyMachine):
    return sorted(range(machine.n_inputs), key=lambda a: machine.inputs[a])


def equivalent(m1: MealyMachine, m2: MealyMachine) -> Optional[Observation]:
    """None when the machines agree on every input word, else a shortest
    counterexample paired with m1's outputs on it.

    Product-automaton BFS; among shortest witnesses the lexicographically
    least over the sorted input alphabet is returned, so results are
    deterministic.
    """
    if set(m1.inputs) != set(m2.inputs):
        raise ValueError("machines do not share an input alphabet")
    order = _sorted_input_order(m1)
    col2 = [m2.inputs.index(sym) for sym in m1.inputs]
    out2_as_1 = [m1.outputs.index(s) if s in m1.outputs else -1 for s in m2.outputs]
    t1, f1 = m1.transitions, m1.output_fun
    t2, f2 = m2.transitions, m2.output_fun
    start = (m1.initial, m2.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        q1, q2 = pair
        for a in order:
            b = col2[a]
            if int(f1[q1, a]) != out2_as_1[int(f2[q2, b])]:
                word = [a]
                node = pair
                while parent[node] is not None:
                    node, sym = parent[node]
                    word.append(sym)
                word.reverse()
                witness = tuple(word)
                return Observation(witness, run_word(m1, witness))
            nxt = (int(t1[q1, a]), int(t2[q2, b]))
            if nxt not in parent:
                parent[nxt] = (pair, a)
                queue.append(nxt)
    return None


def _reachable(machine: MealyMachine, order):
    seen = {machine.initial}
    frontier = deque([machine.initial])
    out = [machine.initial]
    while frontier:
        q = frontier.popleft()
        for a in order:
            t = int(machine.transitions[q, a])
            if t not in seen:
                seen.add(t)
                out.append(t)
                frontier.append(t)
    return out


def minimize_canonical(machine: MealyMachine) -> MealyMachine:
    """The unique minimal machine equivalent to `machine`, in canonical form.

    Canonical means: input alphabet sorted, output alphabet restricted to the
    symbols actually emitted and sorted, states renumbered by breadth-first
    discovery over the sorted inputs.  Two machines are language-equivalent
    iff their canonical forms are structurally identical (and serialize to
    identical DOT text).
    """
    order = _sorted_input_order(machine)
    reach = _reachable(machine, order)
    trans, outf = machine.transitions, machine.output_fun

    # partition refinement: start from output signatures, refine by successor blocks
    block = {}
    sig_ids = {}
    for q in reach:
        sig = tuple(machine.outputs[outf[q, a]] for a in order)
        block[q] = sig_ids.setdefault(sig, len(sig_ids))
    n_blocks = len(sig_ids)
    while True:
        sig_ids = {}
        new_block = {}
        for q in reach:
            sig = (block[q],) + tuple(block[int(trans[q, a])] for a in order)
            new_block[q] = sig_ids.setdefault(sig, len(sig_ids))
        if len(sig_ids) == n_blocks:
            block = new_block
            break
        n_blocks = len(sig_ids)
        block = new_block

    # representative per block, then BFS renumbering from the initial block
    rep = {}
    for q in reach:
        rep.setdefault(block[q], q)
    number = {block[machine.initial]: 0}
    bfs = deque([block[machine.initial]])
    ordered_blocks = [block[machine.initial]]
    while bfs:
        b = bfs.popleft()
        q = rep[b]
        for a in order:
            tb = block[int(trans[q, a])]
            if tb not in number:
                number[tb] = len(number)
                ordered_blocks.append(tb)
                bfs.append(tb)

    used = sorted({machine.outputs[outf[rep[b], a]] for b in ordered_blocks for a in order})
    out_index = {s: i for i, s in enumerate(used)}
    n = len(ordered_blocks)
    k = len(order)
    new_trans = np.zeros((n, k), dtype=np.int64)
    new_outf = np.zeros((n, k), dtype=np.int64)
    for b in ordered_blocks:
        i = number[b]
        q = rep[b]
        for j, a in enumerate(order):
            new_trans[i, j] = number[block[int(trans[q, a])]]
            new_outf[i, j] = out_index[machine.outputs[outf[q, a]]]
    inputs = tuple(machine.inputs[a] for a in order)
    return MealyMachine(0, inputs, tuple(used), new_trans, new_outf)


def canonical_fingerprint(machine: MealyMachine) -> str:
    """A string that is equal for two machines iff they are language-equivalent."""
    return write_dot(minimize_canonical(machine))


def same_structure(m1: MealyMachine, m2: MealyMachine) -> bool:
    """State-for-state, symbol-for-symbol identity (alphabet order ignored)."""
    if m1.n_states != m2.n_states or m1.initial != m2.initial:
        return False
    if set(m1.inputs) != set(m2.inputs):
        return False
    col2 = [m2.inputs.index(sym) for sym in m1.inputs]
    for q in range(m1.n_states):
        for a in range(m1.n_inputs):
            b = col2[a]
            if int(m1.transitions[q, a]) != int(m2.transitions[q, b]):
                return False
            if m1.outputs[m1.output_fun[q, a]] != m2.outputs[m2.output_fun[q, b]]:
                return False
    return True


def write_dot(machine: MealyMachine) -> str:
    """Serialize to the DOT dialect accepted by `parse_dot` (always with the
    hidden `__start0` initial-state marker)."""
    lines = [
        "digraph g {",
        '\t__start0 [label="" shape="none"];',
        f"\t__start0 -> s{machine.initial};",
    ]
    for q in range(machine.n_states):
        for a in range(machine.n_inputs):
            t = int(machine.transitions[q, a])
            o = machine.outputs[machine.output_fun[q, a]]
            lines.append(f'\ts{q} -> s{t} [label="{machine.inputs[a]} / {o}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


_EDGE_RE = re.compile(r'^("[^"]*"|[\w.$+-]+)\s*->\s*("[^"]*"|[\w.$+-]+)\s*(\[(?P<attrs>.*)\])?\s*;?$')
_NODE_RE = re.compile(r'^("[^"]*"|[\w.$+-]+)\s*(\[[^\]]*\])?\s*;?$')
_LABEL_RE = re.compile(r'label\s*=\s*"(?P<label>[^"]*)"')
_KEYWORDS = {"digraph", "graph", "node", "edge", "subgraph"}


def _dequote(name: str) -> str:
    if len(name) >= 2 and name[0] == '"' and name[-1] == '"':
        return name[1:-1]
    return name


def _natural_key(name: str):
    return tuple(
        (0, int(part)) if part.isdigit() else (1, part)
        for part in re.split(r"(\d+)", name)
        if part
    )


def parse_dot(text: str) -> MealyMachine:
    """Parse the accepted DOT subset into a machine.

    The initial state comes from a `__start0 -> sX;` marker when present,
    otherwise from the first declared node.  Transition labels are split on
    the first `/` and both sides trimmed.  States are numbered densely in
    natural sort order of their names, so `parse_dot(write_dot(m))` restores
    `m`'s numbering.
    """
    edges = []  # (src, dst, input symbol, output symbol, line)
    declared = []
    initial_name = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stmt = raw.strip()
        if not stmt or stmt in ("{", "}") or stmt.startswith(("//", "#")):
            continue
        head = stmt.split(None, 1)[0]
        if head == "digraph" or head == "}":
            continue
        if "->" in stmt:
            m = _EDGE_RE.match(stmt)
            if not m:
                raise DotParseError("malformed transition statement", lineno)
            src = _dequote(m.group(1))
            dst = _dequote(m.group(2))
            if src == "__start0":
                initial_name = dst
                continue
            attrs = m.group("attrs") or ""
            lm = _LABEL_RE.search(attrs)
            if not lm:
                raise DotParseError("transition without a label", lineno)
            label = lm.group("label")
            if "/" not in label:
                raise DotParseError(f'label "{label}" is not of the form "in / out"', lineno)
            in_sym, out_sym = label.split("/", 1)
            in_sym = in_sym.strip()
            out_sym = out_sym.strip()
            if not in_sym or not out_sym:
                raise DotParseError(f'label "{label}" has an empty side', lineno)
            edges.append((src, dst, in_sym, out_sym, lineno))
        else:
            m = _NODE_RE.match(stmt)
            if not m:
                raise DotParseError("unrecognized statement", lineno)
            name = _dequote(m.group(1))
            if name in _KEYWORDS or name == "__start0":
                continue
            if name not in declared:
                declared.append(name)

    if not edges:
        raise DotParseError("no transitions found")
    names = set(declared)
    for src, dst, _, _, _ in edges:
        names.add(src)
        names.add(dst)
    ordered = sorted(names, key=_natural_key)
    state_id = {name: i for i, name in enumerate(ordered)}

    if initial_name is None:
        initial_name = declared[0] if declared else edges[0][0]
    if initial_name not in state_id:
        raise DotParseError(f"initial state {initial_name!r} never declared")

    inputs = tuple(sorted({e[2] for e in edges}))
    outputs = tuple(sorted({e[3] for e in edges}))
    in_index = {s: i for i, s in enumerate(inputs)}
    out_index = {s: i for i, s in enumerate(outputs)}
    n, k = len(ordered), len(inputs)
    trans = np.full((n, k), -1, dtype=np.int64)
    outf = np.zeros((n, k), dtype=np.int64)
    for src, dst, in_sym, out_sym, lineno in edges:
        q, a = state_id[src], in_index[in_sym]
        if trans[q, a] != -1:
            raise DotParseError(f"duplicate transition for {src}/{in_sym}", lineno)
        trans[q, a] = state_id[dst]
        outf[q, a] = out_index[out_sym]
    for q in range(n):
        for a in range(k):
            if trans[q, a] == -1:
                raise DotParseError(
                    f"incomplete transition function at {ordered[q]}/{inputs[a]}"
                )
    return MealyMachine(state_id[initial_name], inputs, outputs, trans, outf)


def random_mealy(n_states, inputs, outputs, seed, max_tries=1000) -> MealyMachine:
    """A random machine that is connected from the initial state and minimal,
    deterministic in `seed`.  Draws are rejected until minimal, up to
    `max_tries` (with a single output symbol this can never succeed for
    n_states > 1)."""
    if n_states < 1:
        raise ValueError("n_states must be at least 1")
    inputs = tuple(inputs)
    outputs = tuple(outputs)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        trans = rng.integers(0, n_states, size=(n_states, len(inputs)))
        outf = rng.integers(0, len(outputs), size=(n_states, len(inputs)))
        m = MealyMachine(0, inputs, outputs, trans, outf)
        if minimize_canonical(m).n_states == n_states:
            return m
    raise GenerationError(
        f"no minimal {n_states}-state machine found in {max_tries} draws"
    )
