"""MAT learners and the conflict-aware outer run loop.

Learners interact with the world only through a membership oracle; Restart
unwinds them as an exception so the algorithms themselves stay oblivious to
conflict handling, exactly like classic MAT implementations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .mealy import MealyMachine, Observation, canonical_fingerprint, run_from, run_word
from .reviser import RESTART, SURVIVED, Reviser
from .sul import BudgetExhausted


class RestartInterrupt(Exception):
    """Raised by an oracle when the answer is Restart; unwinds the learner."""


class LearnerInconsistency(RuntimeError):
    """The learner's data can no longer support a valid refinement step."""


class RevisorTeacher:
    """The learner's view of the Reviser: a plain MAT membership oracle."""

    def __init__(self, reviser: Reviser):
        self.reviser = reviser

    def mq(self, word):
        answer = self.reviser.mq(word)
        if answer is RESTART:
            raise RestartInterrupt
        return answer


class MealyLearner:
    """Contract shared by the learners: `build_hypothesis` runs queries until
    the next complete hypothesis, `process_counterexample` refines it, and
    `restart` drops every derived structure (knowledge is re-obtained through
    the oracle, which answers from cache, so restarting adds no system
    tests)."""

    def __init__(self, oracle, inputs, outputs):
        self.oracle = oracle
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self._hypothesis = None
        self._access = None
        self.restart()

    def restart(self):
        raise NotImplementedError

    def build_hypothesis(self) -> MealyMachine:
        raise NotImplementedError

    def process_counterexample(self, obs: Observation):
        """Refine one analysis step at a time until the rebuilt hypothesis
        answers the counterexample correctly, so the next emitted hypothesis
        is never language-equivalent to the refuted one."""
        self._require_hypothesis(obs)
        for _ in range(2 * len(obs.inputs) + 16):
            if run_word(self._hypothesis, obs.inputs) == obs.outputs:
                return
            self._refine_once(obs)
            self.build_hypothesis()
        raise LearnerInconsistency("counterexample not resolved by refinement")

    def _refine_once(self, obs: Observation):
        raise NotImplementedError

    # counterexample analysis shared by both learners: position j "matches"
    # when the system, started from the access word of the hypothesis state
    # reached after j symbols, agrees with the hypothesis on the rest
    def _match(self, states, u, j):
        access = self._access[states[j]]
        answer = self.oracle.mq(access + u[j:])[len(access):]
        return answer == run_from(self._hypothesis, states[j], u[j:])

    def _state_path(self, u):
        h = self._hypothesis
        states = [h.initial]
        s = h.initial
        for a in u:
            s = int(h.transitions[s, a])
            states.append(s)
        return states

    def _require_hypothesis(self, obs):
        if self._hypothesis is None:
            raise LearnerInconsistency("counterexample before any hypothesis")
        if len(obs.inputs) != len(obs.outputs) or not obs.inputs:
            raise LearnerInconsistency("malformed counterexample")


class LStarRS(MealyLearner):
    """Observation-table learner with Rivest-Schapire counterexample
    processing, in Mealy form: columns start as the single input symbols and
    cells hold output-word suffixes.

    The prefix set stays prefix-closed with pairwise distinct rows, so a
    closed table is automatically consistent and maps directly to a machine.
    """

    def restart(self):
        self._prefixes = [()]
        self._suffixes = [(a,) for a in range(len(self.inputs))]
        self._cells = {}
        self._hypothesis = None
        self._access = None

    def _cell(self, prefix, suffix):
        key = (prefix, suffix)
        value = self._cells.get(key)
        if value is None:
            value = self.oracle.mq(prefix + suffix)[len(prefix):]
            self._cells[key] = value
        return value

    def _row(self, prefix):
        return tuple(self._cell(prefix, e) for e in self._suffixes)

    def build_hypothesis(self) -> MealyMachine:
        k = len(self.inputs)
        while True:
            rows = {}
            for p in self._prefixes:
                r = self._row(p)
                if r in rows:
                    raise LearnerInconsistency("duplicate rows in the prefix set")
                rows[r] = p
            grew = False
            for p in list(self._prefixes):
                for a in range(k):
                    r = self._row(p + (a,))
                    if r not in rows:
                        self._prefixes.append(p + (a,))
                        rows[r] = p + (a,)
                        grew = True
            if not grew:
                break
        n = len(self._prefixes)
        index = {self._row(p): i for i, p in enumerate(self._prefixes)}
        trans = np.zeros((n, k), dtype=np.int64)
        outf = np.zeros((n, k), dtype=np.int64)
        for i, p in enumerate(self._prefixes):
            for a in range(k):
                trans[i, a] = index[self._row(p + (a,))]
                outf[i, a] = self._cell(p, (a,))[0]
        self._hypothesis = MealyMachine(0, self.inputs, self.outputs, trans, outf)
        self._access = list(self._prefixes)
        return self._hypothesis

    def _refine_once(self, obs: Observation):
        u = obs.inputs
        n = len(u)
        states = self._state_path(u)
        if self._match(states, u, 0):
            raise LearnerInconsistency("counterexample not reproducible")
        # binary search for an adjacent flip: position `lo` mismatches,
        # `lo + 1` matches (position n matches vacuously)
        lo, hi = 0, n
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self._match(states, u, mid):
                hi = mid
            else:
                lo = mid
        suffix = u[lo + 1:]
        if not suffix or suffix in self._suffixes:
            raise LearnerInconsistency("no fresh distinguishing suffix in counterexample")
        self._suffixes.append(suffix)


class _DTLeaf:
    __slots__ = ("access", "state", "parent", "key")

    def __init__(self, access):
        self.access = access
        self.state = None
        self.parent = None
        self.key = None


class _DTInner:
    __slots__ = ("suffix", "children", "parent", "key")

    def __init__(self, suffix):
        self.suffix = suffix
        self.children = {}
        self.parent = None
        self.key = None

    def attach(self, key, node):
        self.children[key] = node
        node.parent = self
        node.key = key


class KVLearner(MealyLearner):
    """Discrimination-tree learner in Mealy form: leaves hold access words,
    inner nodes hold distinguishing suffixes with children keyed by the
    observed output word.  Sifting uses membership queries only; a
    counterexample splits a leaf by the shortest distinguishing suffix found
    along it."""

    def restart(self):
        root = _DTLeaf(())
        root.state = 0
        self._root = root
        self._leaves = [root]
        self._hypothesis = None
        self._access = None

    def _sift(self, word):
        node = self._root
        while isinstance(node, _DTInner):
            answer = self.oracle.mq(word + node.suffix)[len(word):]
            child = node.children.get(answer)
            if child is None:
                child = _DTLeaf(word)
                child.state = len(self._leaves)
                self._leaves.append(child)
                node.attach(answer, child)
            node = child
        return node

    def build_hypothesis(self) -> MealyMachine:
        k = len(self.inputs)
        while True:
            known = len(self._leaves)
            rows = []
            for leaf in list(self._leaves):
                targets = []
                emits = []
                for a in range(k):
                    word = leaf.access + (a,)
                    targets.append(self._sift(word).state)
                    emits.append(self.oracle.mq(word)[-1])
                rows.append((targets, emits))
            if len(self._leaves) == known:
                break
        n = len(self._leaves)
        trans = np.zeros((n, k), dtype=np.int64)
        outf = np.zeros((n, k), dtype=np.int64)
        for i, (targets, emits) in enumerate(rows):
            trans[i] = targets
            outf[i] = emits
        initial = self._sift(()).state
        self._hypothesis = MealyMachine(initial, self.inputs, self.outputs, trans, outf)
        self._access = [leaf.access for leaf in self._leaves]
        return self._hypothesis

    def _refine_once(self, obs: Observation):
        u = obs.inputs
        n = len(u)
        states = self._state_path(u)
        flip = None
        for j in range(n - 1, -1, -1):
            if not self._match(states, u, j):
                flip = j
                break
        if flip is None:
            raise LearnerInconsistency("counterexample not reproducible")
        suffix = u[flip + 1:]
        if not suffix:
            raise LearnerInconsistency("empty distinguishing suffix")
        old_leaf = self._leaves[states[flip + 1]]
        new_access = self._access[states[flip]] + (u[flip],)
        old_answer = self.oracle.mq(old_leaf.access + suffix)[len(old_leaf.access):]
        new_answer = self.oracle.mq(new_access + suffix)[len(new_access):]
        if old_answer == new_answer:
            raise LearnerInconsistency("suffix fails to split the leaf")
        inner = _DTInner(suffix)
        parent, key = old_leaf.parent, old_leaf.key
        if parent is None:
            self._root = inner
        else:
            parent.attach(key, inner)
        inner.attach(old_answer, old_leaf)
        new_leaf = _DTLeaf(new_access)
        new_leaf.state = len(self._leaves)
        self._leaves.append(new_leaf)
        inner.attach(new_answer, new_leaf)


LEARNERS = {"lstar_rs": LStarRS, "kv": KVLearner}


class HypothesisSelection(Enum):
    MOST_RECENT = "most_recent"
    MOST_FREQUENT = "most_frequent"


def elect(entries, selection: HypothesisSelection):
    """Pick the winning fingerprint from (fingerprint, count, last_index)
    entries: the last one seen, or the most frequent with ties to the most
    recently seen."""
    entries = list(entries)
    if not entries:
        raise ValueError("no hypothesis was ever produced")
    if selection is HypothesisSelection.MOST_RECENT:
        return max(entries, key=lambda e: e[2])[0]
    return max(entries, key=lambda e: (e[1], e[2]))[0]


class HypothesisLog:
    """Counts each unique model (up to language equivalence) in the sequence
    of emitted hypotheses, via canonical fingerprints."""

    def __init__(self):
        self._entries = {}  # fingerprint -> [count, last_index, machine]
        self.total = 0
        self.last_fingerprint = None

    def record(self, machine: MealyMachine) -> str:
        fp = canonical_fingerprint(machine)
        entry = self._entries.get(fp)
        if entry is None:
            self._entries[fp] = [1, self.total, machine]
        else:
            entry[0] += 1
            entry[1] = self.total
        self.total += 1
        self.last_fingerprint = fp
        return fp

    def entries(self):
        return [(fp, c, last) for fp, (c, last, _) in self._entries.items()]

    def distinct(self) -> int:
        return len(self._entries)

    def elect_machine(self, selection: HypothesisSelection) -> MealyMachine:
        winner = elect(self.entries(), selection)
        return self._entries[winner][2]


@dataclass
class RunStats:
    outcome: str = "no_hypothesis"  # survived | budget | no_hypothesis | inconsistent
    hypotheses: int = 0
    distinct_hypotheses: int = 0
    learner_resets: int = 0
    eq_symbols: int = 0
    log: HypothesisLog = field(default_factory=HypothesisLog)


def run_ceal(learner_factory, reviser: Reviser,
             selection: HypothesisSelection = HypothesisSelection.MOST_FREQUENT):
    """Drive one conflict-aware learning run to completion.

    Restart discards the learner instance (the tree is retained, so the
    rebuilt learner replays its queries against the cache at no system
    cost).  Election counts the hypotheses that reached system testing:
    one the stored knowledge refutes outright is a rebuilding step, not a
    produced model, and (after restarts) the same early models would
    otherwise pile up counts and skew most-frequent election.
    Returns (elected machine or None, RunStats)."""
    oracle = RevisorTeacher(reviser)
    tree = reviser.tree
    stats = RunStats()
    log = stats.log

    def fresh():
        stats.learner_resets += 1
        return learner_factory(oracle, tree.inputs, tree.outputs)

    learner = learner_factory(oracle, tree.inputs, tree.outputs)
    stalled_at = -1

    def finish(outcome, machine=None):
        stats.outcome = outcome
        stats.hypotheses = log.total
        stats.distinct_hypotheses = log.distinct()
        return machine, stats

    while True:
        try:
            hypothesis = learner.build_hypothesis()
        except RestartInterrupt:
            learner = fresh()
            continue
        except LearnerInconsistency:
            if reviser.system_tests == stalled_at:
                return finish("inconsistent")
            stalled_at = reviser.system_tests
            learner = fresh()
            continue
        except BudgetExhausted:
            return finish("budget")
        try:
            answer = reviser.eq(hypothesis)
        except BudgetExhausted:
            return finish("budget")
        if reviser.last_eq_tested:
            log.record(hypothesis)
        if answer is SURVIVED:
            return finish("survived", log.elect_machine(selection))
        if answer is RESTART:
            learner = fresh()
            continue
        try:
            learner.process_counterexample(answer)
        except RestartInterrupt:
            learner = fresh()
        except LearnerInconsistency:
            if reviser.system_tests == stalled_at:
                return finish("inconsistent")
            stalled_at = reviser.system_tests
            learner = fresh()
        except BudgetExhausted:
            return finish("budget")
