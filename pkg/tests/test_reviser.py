import numpy as np
import pytest

from caal.mealy import MealyMachine, Observation, random_mealy, run_word
from caal.obstree import ObservationTree, UpdateStrategy
from caal.reviser import RESTART, SURVIVED, EventLog, Reviser, trim_counterexample
from caal.sul import NoiseKind, NoiseSpec, RepeatsPolicy, SystemHandle

from conftest import example1_machine, example1_stream, example1_update, make_toggle, obs


def reviser_for(machine, noise=None, mutations=None,
                tree_strategy=UpdateStrategy.MOST_RECENT,
                survive_budget=200, seed=0, events=None):
    tree = ObservationTree(machine.inputs, machine.outputs, tree_strategy)
    system = SystemHandle(machine, noise, mutations=mutations)
    return Reviser(tree, system, policy=RepeatsPolicy(1, 1),
                   survive_budget=survive_budget,
                   rng=np.random.default_rng(seed), events=events)


def example_reviser():
    # the example machine's outputs are ("a", "b", "-"), so the encoded
    # example observations (over "a"/"b" only) keep the same indices
    r = reviser_for(example1_machine())
    for o in example1_stream():
        assert r.apply(o) == o.outputs
    return r


def test_apply_fresh_tree_returns_output():
    r = reviser_for(make_toggle())
    assert r.apply(Observation((0, 0), (0, 1))) == (0, 1)
    assert r.conflicts == 0


def test_apply_example_conflict_returns_restart():
    r = example_reviser()
    assert r.apply(example1_update()) is RESTART
    assert r.conflicts == 1


def test_apply_reapplied_observation_is_not_a_conflict():
    r = example_reviser()
    o = example1_stream()[0]
    assert r.apply(o) == o.outputs
    assert r.conflicts == 0


def test_read_cached_word_never_touches_the_system():
    r = example_reviser()
    word = obs("aab", "aaa").inputs
    tests_before = r.system.tests
    assert r.read(word) == obs("aab", "aaa").outputs
    assert r.system.tests == tests_before


def test_read_uncached_word_is_a_passthrough_test():
    m = random_mealy(5, ("a", "b"), ("x", "y"), seed=3)
    r = reviser_for(m)
    word = (0, 1, 0)
    assert r.read(word) == run_word(m, word)
    assert r.system.tests == 1
    # second read is cached
    assert r.read(word) == run_word(m, word)
    assert r.system.tests == 1


def test_read_conflict_after_mutation_returns_restart():
    m = make_toggle()
    mutant = MealyMachine(0, ("a",), ("x", "y"), [[1], [0]], [[1], [0]])
    r = reviser_for(m, mutations=[(1, mutant)])
    assert r.read((0, 0)) == run_word(m, (0, 0))
    # longer word re-runs the mutated machine over the cached prefix
    answer = r.read((0, 0, 0))
    assert answer is RESTART
    assert r.conflicts == 1


def test_check_single_machine_consistency():
    m = random_mealy(6, ("a", "b"), ("x", "y"), seed=9)
    r = reviser_for(m)
    rng = np.random.default_rng(1)
    for _ in range(40):
        w = tuple(int(x) for x in rng.integers(0, 2, size=int(rng.integers(1, 8))))
        r.read(w)
    assert r.check(m) is None


def test_check_empty_tree_is_vacuous():
    r = reviser_for(make_toggle())
    assert r.check(make_toggle()) is None


def test_check_returns_trimmed_counterexample():
    r = example_reviser()
    assert r.apply(example1_update()) is RESTART
    # h answers "aab" on "aaa": diverges from the stored (aaa, abb) at the
    # second symbol, so the counterexample is trimmed to (aa, ab)
    m = example1_machine()  # emits aab on aaa
    cex = r.check(m)
    assert cex == obs("aa", "ab")


def test_trim_counterexample_positions():
    m = example1_machine()
    full = Observation(obs("aaa", "abb").inputs, obs("aaa", "abb").outputs)
    assert trim_counterexample(m, full) == obs("aa", "ab")
    agreeing = Observation(obs("ab", "ab").inputs, obs("ab", "ab").outputs)
    assert trim_counterexample(m, agreeing) is None


def test_test_survives_exactly_budget_tests_on_true_hypothesis():
    m = random_mealy(4, ("a", "b"), ("x", "y"), seed=5)
    r = reviser_for(m, survive_budget=57)
    assert r.test(m) is SURVIVED
    assert r.system.tests == 57
    assert r.eq_symbols == r.system.symbols


def test_test_finds_counterexample_for_wrong_hypothesis():
    target = random_mealy(3, ("a", "b"), ("x", "y"), seed=21)
    wrong = MealyMachine(target.initial, target.inputs, target.outputs,
                         np.array(target.transitions),
                         1 - np.array(target.output_fun))
    r = reviser_for(target, survive_budget=5000)
    answer = r.test(wrong)
    assert isinstance(answer, Observation)
    # the counterexample reflects the tree's committed knowledge
    assert r.tree.lookup(answer.inputs) == answer.outputs
    assert run_word(wrong, answer.inputs) != answer.outputs


def test_test_restart_when_system_contradicts_cache():
    m = make_toggle()
    mutant = MealyMachine(0, ("a",), ("x", "y"), [[1], [0]], [[1], [0]])
    r = reviser_for(m, mutations=[(3, mutant)], survive_budget=100)
    # warm the cache before the mutation kicks in
    for w in [(0,), (0, 0), (0, 0, 0)]:
        r.read(w)
    assert r.test(m) is RESTART


def test_eq_short_circuits_on_stored_counterexample():
    r = example_reviser()
    r.apply(example1_update())
    tests_before = r.system.tests
    cex = r.eq(example1_machine())
    assert cex == obs("aa", "ab")
    assert r.system.tests == tests_before  # zero system tests


def test_eq_survives_for_true_hypothesis():
    m = random_mealy(4, ("a", "b"), ("x", "y"), seed=13)
    r = reviser_for(m, survive_budget=40)
    assert r.eq(m) is SURVIVED


def test_mq_answers_come_from_the_stored_language():
    m = random_mealy(5, ("a", "b"), ("x", "y"), seed=17)
    r = reviser_for(m)
    rng = np.random.default_rng(2)
    for _ in range(60):
        w = tuple(int(x) for x in rng.integers(0, 2, size=int(rng.integers(0, 7))))
        answer = r.mq(w)
        assert answer == r.tree.lookup(w)


def test_restart_iff_conflict_counters_over_noisy_run():
    m = random_mealy(5, ("a", "b"), ("x", "y"), seed=19)
    tree = ObservationTree(m.inputs, m.outputs, UpdateStrategy.MOST_RECENT)
    system = SystemHandle(m, NoiseSpec(NoiseKind.OUTPUT, 0.3, seed=4))
    r = Reviser(tree, system, policy=RepeatsPolicy(1, 1),
                rng=np.random.default_rng(3))
    rng = np.random.default_rng(8)
    restarts_seen = 0
    for _ in range(300):
        w = tuple(int(x) for x in rng.integers(0, 2, size=int(rng.integers(1, 7))))
        if r.mq(w) is RESTART:
            restarts_seen += 1
    assert r.conflicts > 0
    assert r.restarts == r.conflicts == restarts_seen
    # every system response was integrated exactly once
    assert r.applies == r.system_tests


def test_cached_reads_never_issue_system_tests_even_under_noise(monkeypatch):
    # behavioral check of the caching guarantee: wrap read() and verify that
    # whenever the queried word was cached, the system counters do not move
    m = random_mealy(5, ("a", "b"), ("x", "y"), seed=23)
    tree = ObservationTree(m.inputs, m.outputs, UpdateStrategy.MOST_RECENT)
    system = SystemHandle(m, NoiseSpec(NoiseKind.OUTPUT, 0.2, seed=6))
    r = Reviser(tree, system, policy=RepeatsPolicy(1, 1), rng=np.random.default_rng(4))
    original = Reviser.read
    violations = []

    def checked_read(self, word):
        cached = self.tree.lookup(word)
        before = self.system.tests
        answer = original(self, word)
        if cached is not None and self.system.tests != before:
            violations.append(tuple(word))
        return answer

    monkeypatch.setattr(Reviser, "read", checked_read)
    rng = np.random.default_rng(10)
    for _ in range(400):
        w = tuple(int(x) for x in rng.integers(0, 2, size=int(rng.integers(0, 6))))
        r.mq(w)
    assert violations == []


def test_event_log_records_tests_restarts_hypotheses():
    m = random_mealy(4, ("a", "b"), ("x", "y"), seed=29)
    events = EventLog()
    r = reviser_for(m, survive_budget=10, events=events)
    r.mq((0, 1))
    r.eq(m)
    kinds = [rec["kind"] for rec in events.records]
    assert kinds.count("hypothesis") == 1
    assert kinds.count("test") == 11  # one mq test + ten eq tests
    last = events.records[-1]
    assert set(last) == {"kind", "test_index", "word_length", "cumulative_symbols"}
    assert last["cumulative_symbols"] == r.system.symbols
