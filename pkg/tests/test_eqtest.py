import numpy as np
import pytest

from caal.eqtest import SamplerParams, TestSampler, char_set, transition_cover
from caal.mealy import (
    MealyMachine,
    minimize_canonical,
    random_mealy,
    run_from,
    run_word,
)

from conftest import make_toggle


def test_char_set_single_state_is_empty():
    m = MealyMachine(0, ("a", "b"), ("x",), [[0, 0]], [[0, 0]])
    assert char_set(m) == []


def test_char_set_toggle_is_single_input():
    # hand refinement: the outputs on "a" already split the two states
    assert char_set(make_toggle()) == [(0,)]


def test_char_set_distinguishes_all_state_pairs():
    for seed in range(25):
        m = random_mealy(int(np.random.default_rng(seed).integers(2, 6)),
                         ("a", "b"), ("x", "y"), seed)
        mc = minimize_canonical(m)
        suffixes = char_set(m)
        assert len(suffixes) <= mc.n_states - 1
        for q1 in range(mc.n_states):
            for q2 in range(q1 + 1, mc.n_states):
                assert any(run_from(mc, q1, w) != run_from(mc, q2, w) for w in suffixes)


def test_transition_cover_toggle():
    cover = transition_cover(make_toggle())
    assert cover[(0, 0)] == (0,)
    assert cover[(1, 0)] == (0, 0)
    assert len(cover) == 2  # |states| * |inputs|


def test_transition_cover_initial_state_accessed_by_epsilon():
    m = random_mealy(6, ("a", "b"), ("x", "y"), seed=4)
    cover = transition_cover(m)
    assert len(cover) == m.n_states * m.n_inputs
    for a in range(m.n_inputs):
        assert cover[(m.initial, a)] == (a,)


def test_transition_cover_rejects_unreachable_states():
    m = MealyMachine(0, ("a",), ("x", "y"), [[0], [0]], [[0], [1]])
    with pytest.raises(ValueError, match="unreachable"):
        transition_cover(m)


def test_sampler_degenerate_params_single_state():
    m = MealyMachine(0, ("a",), ("x",), [[0]], [[0]])
    sampler = TestSampler(m, SamplerParams(expected_infix_len=0.0, extra_states=0))
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert sampler.sample(rng) == (0,)


def test_sampler_golden_draws_seed_42():
    sampler = TestSampler(make_toggle(), SamplerParams())
    rng = np.random.default_rng(42)
    draws = [sampler.sample(rng) for _ in range(6)]
    # frozen from a seeded reference run; guards the draw order
    assert draws == [
        (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
        (0, 0),
        (0, 0, 0, 0, 0, 0, 0, 0, 0),
        (0, 0, 0, 0),
        (0, 0, 0, 0, 0, 0, 0),
        (0, 0, 0, 0, 0),
    ]


def test_sampler_deterministic_in_seed():
    m = random_mealy(5, ("a", "b"), ("x", "y"), seed=6)
    sampler = TestSampler(m)
    a = [sampler.sample(np.random.default_rng(9)) for _ in range(50)]
    b = [sampler.sample(np.random.default_rng(9)) for _ in range(50)]
    assert a == b


def test_sampler_covers_every_transition_prefix():
    m = random_mealy(6, ("a", "b"), ("x", "y"), seed=10)
    sampler = TestSampler(m)
    rng = np.random.default_rng(3)
    samples = [sampler.sample(rng) for _ in range(10_000)]
    cover = transition_cover(minimize_canonical(m))
    for word in cover.values():
        assert any(s[: len(word)] == word for s in samples)


def test_fault_coverage_single_transition_mutants():
    # desk-scale surrogate for m-completeness: a wrong hypothesis differing
    # in one transition is always caught within 10k sampled tests
    rng = np.random.default_rng(123)
    found_all = True
    for seed in range(8):
        target = random_mealy(5, ("a", "b"), ("x", "y"), seed=seed + 50)
        # flip one transition's output
        q = int(rng.integers(target.n_states))
        a = int(rng.integers(target.n_inputs))
        outf = np.array(target.output_fun)
        outf[q, a] = 1 - outf[q, a]
        hypothesis = MealyMachine(target.initial, target.inputs, target.outputs,
                                  np.array(target.transitions), outf)
        sampler = TestSampler(hypothesis)
        caught = False
        for _ in range(10_000):
            w = sampler.sample(rng)
            if run_word(target, w) != run_word(hypothesis, w):
                caught = True
                break
        found_all = found_all and caught
    assert found_all
