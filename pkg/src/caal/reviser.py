"""The Reviser: owns the observation tree, tests the system, and answers a
learner's membership/equivalence queries like a teacher, signalling Restart
whenever a new observation conflicts with knowledge already handed out.
"""

from __future__ import annotations

import json

import numpy as np

from .eqtest import SamplerParams, TestSampler
from .mealy import MealyMachine, Observation
from .obstree import ObservationTree
from .sul import RepeatsPolicy, SystemHandle, execute_repeated


class _Restart:
    __slots__ = ()

    def __repr__(self):
        return "Restart"


class _Survived:
    __slots__ = ()

    def __repr__(self):
        return "Survived"


RESTART = _Restart()
SURVIVED = _Survived()


class EventLog:
    """Structured run log: one record per system test, restart and
    hypothesis, with (kind, monotonic test index, word length, cumulative
    symbols).  Serializes to newline-delimited JSON."""

    def __init__(self):
        self.records = []

    def emit(self, kind, test_index, word_length, cumulative_symbols):
        self.records.append({
            "kind": kind,
            "test_index": test_index,
            "word_length": word_length,
            "cumulative_symbols": cumulative_symbols,
        })

    def dump(self, stream):
        for record in self.records:
            stream.write(json.dumps(record) + "\n")

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            self.dump(fh)


def first_divergence(machine: MealyMachine, word, outputs):
    """Index of the first position where the machine's outputs on `word`
    differ from `outputs`, or None when they agree throughout."""
    state = machine.initial
    for t, a in enumerate(word):
        state, o = machine.step(state, a)
        if o != outputs[t]:
            return t
    return None


def trim_counterexample(machine: MealyMachine, obs: Observation):
    """The shortest prefix of `obs` on which the machine already disagrees,
    or None when it agrees with the whole observation."""
    k = first_divergence(machine, obs.inputs, obs.outputs)
    if k is None:
        return None
    return Observation(obs.inputs[: k + 1], obs.outputs[: k + 1])


class Reviser:
    """Mediates between one learner and one system for one learning run.

    Every system response passes through the tree's update exactly once, so
    the restart counter equals the conflicting-update counter by
    construction and learner answers always come from the stored language.
    """

    def __init__(self, tree: ObservationTree, system: SystemHandle,
                 policy: RepeatsPolicy = RepeatsPolicy(),
                 sampler_params: SamplerParams = SamplerParams(),
                 survive_budget: int = 2000, rng=None, events: EventLog | None = None):
        if tree.inputs != system.target.inputs or tree.outputs != system.target.outputs:
            raise ValueError("tree and system must share alphabets")
        if survive_budget < 1:
            raise ValueError("survive budget must be positive")
        self.tree = tree
        self.system = system
        self.policy = policy
        self.sampler_params = sampler_params
        self.survive_budget = survive_budget
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.events = events
        self.system_tests = 0
        self.applies = 0
        self.conflicts = 0
        self.restarts = 0
        self.eq_symbols = 0
        self.last_eq_tested = False
        self.trace = None  # tests may install a list to record query traffic

    def _emit(self, kind, word_length=0):
        if self.events is not None:
            self.events.emit(kind, self.system_tests, word_length, self.system.symbols)

    def _system_test(self, word) -> Observation:
        obs = execute_repeated(self.system, word, self.policy)
        self.system_tests += 1
        self._emit("test", len(word))
        return obs

    def apply(self, obs: Observation):
        """Integrate a system trace; Restart when it conflicted, else the
        observed output word."""
        self.applies += 1
        if self.tree.update(obs):
            self.conflicts += 1
            return RESTART
        return obs.outputs

    def read(self, word):
        """Answer from the tree when possible; otherwise run one system test
        (through the repeats channel) and integrate it.  A cached word never
        reaches the system."""
        cached = self.tree.lookup(word)
        if cached is not None:
            if self.trace is not None:
                self.trace.append(("mq-cached", tuple(word)))
            return cached
        if self.trace is not None:
            self.trace.append(("mq-test", tuple(word)))
        return self.apply(self._system_test(word))

    def check(self, hypothesis: MealyMachine):
        """First stored maximal observation the hypothesis contradicts,
        trimmed to the shortest conflicting prefix; None when coherent.
        Pure: no system contact, no tree mutation.

        Implemented as a simultaneous pre-order walk of the active tree and
        the hypothesis (sorted input order): the first divergent edge met is
        exactly the trimmed prefix of the first divergent maximal
        observation."""
        tree = self.tree
        trans = hypothesis.transitions.tolist()
        outf = hypothesis.output_fun.tolist()
        order = tree._sorted_inputs
        path = []

        def walk(node, state):
            row_t = trans[state]
            row_o = outf[state]
            for a in order:
                edge = node.active.get(a)
                if edge is None:
                    continue
                path.append(a)
                if row_o[a] != edge.output:
                    return True
                if walk(edge.child, row_t[a]):
                    return True
                path.pop()
            return False

        if not walk(tree.root, hypothesis.initial):
            return None
        word = tuple(path)
        return Observation(word, tree.lookup(word))

    def test(self, hypothesis: MealyMachine):
        """Search the system for a counterexample to a tree-coherent
        hypothesis: sample test words, integrating every result, until a
        conflict (Restart), a disagreement (counterexample), or
        `survive_budget` consecutive agreeing tests (Survived)."""
        sampler = TestSampler(hypothesis, self.sampler_params)
        before = self.system.symbols
        try:
            agreeing = 0
            while agreeing < self.survive_budget:
                word = sampler.sample(self.rng)
                if self.trace is not None:
                    self.trace.append(("eq-test", word))
                answer = self.apply(self._system_test(word))
                if answer is RESTART:
                    return RESTART
                committed = self.tree.lookup(word)
                if committed is not None:
                    trimmed = trim_counterexample(hypothesis, Observation(word, committed))
                    if trimmed is not None:
                        return trimmed
                agreeing += 1
            return SURVIVED
        finally:
            self.eq_symbols += self.system.symbols - before

    def mq(self, word):
        """Membership query: Read, with Restart surfaced to the learner."""
        answer = self.read(word)
        if answer is RESTART:
            self.restarts += 1
            self._emit("restart")
        return answer

    def eq(self, hypothesis: MealyMachine):
        """Equivalence query: check against the tree first (free), then test
        the system.  Never answers yes; Survived signals provisional halt.

        `last_eq_tested` records whether the answer involved system testing
        (False when the stored knowledge already refuted the hypothesis)."""
        self._emit("hypothesis")
        cex = self.check(hypothesis)
        if cex is not None:
            self.last_eq_tested = False
            return cex
        self.last_eq_tested = True
        answer = self.test(hypothesis)
        if answer is RESTART:
            self.restarts += 1
            self._emit("restart")
        return answer
