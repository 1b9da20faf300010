"""Randomized Wp-style test-word generation for equivalence testing.

A sampled word is (access prefix from the transition cover) + (random infix
of geometric length) + (a characterization-set suffix or nothing, extended
by up to `extra_states` random symbols).  Every word of the classic Wp
suite for `extra_states` extra states has positive sampling probability.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mealy import MealyMachine, minimize_canonical, run_from


@dataclass(frozen=True)
class SamplerParams:
    expected_infix_len: float = 3.0  # mean of the geometric infix length
    extra_states: int = 2            # depth of random extension after the suffix

    def __post_init__(self):
        if self.expected_infix_len < 0:
            raise ValueError("expected infix length must be non-negative")
        if self.extra_states < 0:
            raise ValueError("extra-states depth must be non-negative")


def transition_cover(machine: MealyMachine):
    """Shortest access word per state (BFS, lexicographic ties over the
    sorted input alphabet), extended by every input symbol: a mapping
    (state, input) -> word of size n_states * n_inputs."""
    order = sorted(range(machine.n_inputs), key=lambda a: machine.inputs[a])
    access = {machine.initial: ()}
    queue = [machine.initial]
    while queue:
        q = queue.pop(0)
        for a in order:
            t = int(machine.transitions[q, a])
            if t not in access:
                access[t] = access[q] + (a,)
                queue.append(t)
    if len(access) < machine.n_states:
        missing = sorted(set(range(machine.n_states)) - set(access))
        raise ValueError(f"states unreachable from the initial state: {missing}")
    return {(q, a): access[q] + (a,)
            for q in range(machine.n_states) for a in range(machine.n_inputs)}


def char_set(machine: MealyMachine):
    """A characterization set: suffixes separating every pair of distinct
    states of the canonical minimal machine, extracted from the splitters of
    a partition-refinement splitting tree (at most n_states - 1 suffixes).

    Returned as a deterministically sorted list of words over the machine's
    *sorted* input alphabet (the canonical input order)."""
    mc = minimize_canonical(machine)
    n = mc.n_states
    if n == 1:
        return []

    parents = {}   # leaf/inner node id -> parent id
    suffixes = {}  # inner node id -> splitting word
    next_id = [1]
    root = 0
    leaf_states = {root: list(range(n))}
    state_leaf = {q: root for q in range(n)}

    def lca_suffix(l1, l2):
        seen = set()
        node = l1
        while node is not None:
            seen.add(node)
            node = parents.get(node)
        node = l2
        while node not in seen:
            node = parents[node]
        return suffixes[node]

    def find_splitter(states):
        for a in range(mc.n_inputs):
            if len({int(mc.output_fun[q, a]) for q in states}) > 1:
                return (a,)
        for a in range(mc.n_inputs):
            succ_leaves = [state_leaf[int(mc.transitions[q, a])] for q in states]
            l1 = succ_leaves[0]
            for q2, l2 in zip(states, succ_leaves):
                if l2 != l1:
                    return (a,) + lca_suffix(l1, l2)
        return None

    collected = []
    # a split can make an earlier-examined leaf splittable, so sweep to a
    # fixpoint; each split strictly increases the leaf count, bounding the
    # suffix count by n - 1
    progress = True
    while progress:
        progress = False
        for leaf in sorted(leaf_states):
            states = leaf_states[leaf]
            if len(states) < 2:
                continue
            word = find_splitter(states)
            if word is None:
                # behaviorally equal states (cannot happen on a canonical machine)
                continue
            progress = True
            collected.append(word)
            suffixes[leaf] = word
            del leaf_states[leaf]
            groups = {}
            for q in states:
                groups.setdefault(run_from(mc, q, word), []).append(q)
            for sig in sorted(groups):
                child = next_id[0]
                next_id[0] += 1
                parents[child] = leaf
                leaf_states[child] = groups[sig]
                for q in groups[sig]:
                    state_leaf[q] = child

    return sorted(set(collected), key=lambda w: (len(w), w))


class TestSampler:
    """Seedless sampler over a fixed hypothesis; rebuilt whenever the
    hypothesis changes.  All randomness comes from the generator handed to
    `sample`, so runs are reproducible."""

    __test__ = False  # keep pytest from collecting this as a test class

    def __init__(self, hypothesis: MealyMachine, params: SamplerParams = SamplerParams()):
        # the cover and suffixes come from the canonical form: same language,
        # guaranteed reachable and minimal
        canon = minimize_canonical(hypothesis)
        cover = transition_cover(canon)
        self._cover = [cover[key] for key in sorted(cover)]
        self._suffixes = char_set(canon)
        self._n_inputs = canon.n_inputs
        self._geom_p = 1.0 / (params.expected_infix_len + 1.0)
        self._extra = params.extra_states
        # canonical words are over the sorted input alphabet; translate back
        # to the hypothesis' declared order
        order = sorted(range(hypothesis.n_inputs), key=lambda a: hypothesis.inputs[a])
        self._translate = order

    def _to_declared(self, word):
        return tuple(self._translate[a] for a in word)

    def sample(self, rng):
        """One random test word (over the hypothesis' declared alphabet)."""
        prefix = self._cover[int(rng.integers(len(self._cover)))]
        infix_len = int(rng.geometric(self._geom_p)) - 1
        infix = tuple(int(a) for a in rng.integers(0, self._n_inputs, size=infix_len))
        pick = int(rng.integers(len(self._suffixes) + 1))
        suffix = () if pick == 0 else self._suffixes[pick - 1]
        extra_len = int(rng.integers(self._extra + 1))
        extra = tuple(int(a) for a in rng.integers(0, self._n_inputs, size=extra_len))
        return self._to_declared(prefix + infix + suffix + extra)
