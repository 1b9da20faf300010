"""The classic MAT loop the conflict-aware framework is compared against:
learner + write-once membership cache + majority-voted queries + the same
equivalence sampler.  The first cache contradiction collapses the run.
"""

from __future__ import annotations

import numpy as np

from .eqtest import SamplerParams, TestSampler
from .learners import LearnerInconsistency, RunStats
from .mealy import Observation
from .reviser import EventLog, trim_counterexample
from .sul import BudgetExhausted, RepeatsPolicy, SystemHandle, execute_repeated


class CacheConflictError(RuntimeError):
    """A new answer contradicts the cache; the classic loop cannot recover."""


class MatCache:
    """A prefix-closed trie from input words to output words.  Entries are
    write-once: inserting a contradicting word raises instead of revising."""

    def __init__(self):
        self._root = {}  # input -> [output, child dict]

    def lookup(self, word):
        node = self._root
        out = []
        for a in word:
            entry = node.get(a)
            if entry is None:
                return None
            out.append(entry[0])
            node = entry[1]
        return tuple(out)

    def insert(self, obs: Observation):
        node = self._root
        for a, b in zip(obs.inputs, obs.outputs):
            entry = node.get(a)
            if entry is None:
                entry = [b, {}]
                node[a] = entry
            elif entry[0] != b:
                raise CacheConflictError(
                    f"cached answer contradicted at prefix of {obs.inputs}"
                )
            node = entry[1]


def mat_mq(cache: MatCache, system: SystemHandle, word, policy: RepeatsPolicy):
    """Answer from the cache when possible, else majority-vote the system
    and insert.  Raises CacheConflictError when the fresh answer contradicts
    a cached prefix."""
    cached = cache.lookup(word)
    if cached is not None:
        return cached
    obs = execute_repeated(system, word, policy)
    cache.insert(obs)
    return obs.outputs


class MatOracle:
    """Membership oracle over the cache; conflicts propagate as exceptions
    and end the run."""

    def __init__(self, cache: MatCache, system: SystemHandle, policy: RepeatsPolicy,
                 events: EventLog | None = None):
        self.cache = cache
        self.system = system
        self.policy = policy
        self.events = events
        self.system_tests = 0
        self.trace = None

    def mq(self, word):
        cached = self.cache.lookup(word)
        if cached is not None:
            if self.trace is not None:
                self.trace.append(("mq-cached", tuple(word)))
            return cached
        if self.trace is not None:
            self.trace.append(("mq-test", tuple(word)))
        obs = execute_repeated(self.system, word, self.policy)
        self.system_tests += 1
        if self.events is not None:
            self.events.emit("test", self.system_tests, len(word), self.system.symbols)
        self.cache.insert(obs)
        return obs.outputs


def run_mat(learner_factory, system: SystemHandle, policy: RepeatsPolicy,
            sampler_params: SamplerParams = SamplerParams(),
            survive_budget: int = 2000, rng=None, events: EventLog | None = None):
    """One classic MAT run: learn, hypothesize, sample equivalence tests
    (every result majority-voted and inserted into the cache) until a
    counterexample or `survive_budget` survivals.  The final model is the
    last hypothesis; any cache conflict or learner-internal inconsistency is
    an immediate failure.  Returns (machine or None, RunStats)."""
    if rng is None:
        rng = np.random.default_rng(0)
    cache = MatCache()
    oracle = MatOracle(cache, system, policy, events)
    stats = RunStats()
    log = stats.log
    learner = learner_factory(oracle, system.target.inputs, system.target.outputs)

    def finish(outcome, machine=None):
        stats.outcome = outcome
        stats.hypotheses = log.total
        stats.distinct_hypotheses = log.distinct()
        return machine, stats

    while True:
        try:
            hypothesis = learner.build_hypothesis()
        except CacheConflictError:
            return finish("cache_conflict")
        except LearnerInconsistency:
            return finish("inconsistent")
        except BudgetExhausted:
            return finish("budget")
        log.record(hypothesis)
        if events is not None:
            events.emit("hypothesis", oracle.system_tests, 0, system.symbols)
        sampler = TestSampler(hypothesis, sampler_params)
        counterexample = None
        before = system.symbols
        try:
            agreeing = 0
            while agreeing < survive_budget:
                word = sampler.sample(rng)
                obs = execute_repeated(system, word, policy)
                oracle.system_tests += 1
                if events is not None:
                    events.emit("test", oracle.system_tests, len(word), system.symbols)
                cache.insert(obs)
                trimmed = trim_counterexample(hypothesis, obs)
                if trimmed is not None:
                    counterexample = trimmed
                    break
                agreeing += 1
        except CacheConflictError:
            return finish("cache_conflict")
        except BudgetExhausted:
            return finish("budget")
        finally:
            stats.eq_symbols += system.symbols - before
        if counterexample is None:
            return finish("survived", hypothesis)
        try:
            learner.process_counterexample(counterexample)
        except CacheConflictError:
            return finish("cache_conflict")
        except LearnerInconsistency:
            return finish("inconsistent")
        except BudgetExhausted:
            return finish("budget")
