"""Observation trees: partial, tree-shaped Mealy machines that absorb a
stream of possibly conflicting observations under a fixed update strategy.

Each node keeps, per input symbol, a set of candidate edges; exactly one
candidate per symbol is *active* and the active subgraph is the
deterministic partial machine that `lookup` walks.  `update` returns True
exactly when the call changed the stored language non-additively, i.e. when
some previously answerable query now answers differently (or not at all).
"""

from __future__ import annotations

from enum import Enum

from .mealy import Observation


class UpdateStrategy(Enum):
    MOST_RECENT = "most_recent"
    MOST_FREQUENT = "most_frequent"


class _Edge:
    __slots__ = ("output", "count", "last_seen", "child")

    def __init__(self, output, count, last_seen):
        self.output = output
        self.count = count
        self.last_seen = last_seen
        self.child = _Node()


class _Node:
    __slots__ = ("candidates", "active")

    def __init__(self):
        self.candidates = {}  # input -> list[_Edge], outputs pairwise distinct
        self.active = {}      # input -> _Edge


def conflicts_obs(o1: Observation, o2: Observation) -> bool:
    """True when the observations disagree at some shared input prefix.

    The empty prefix never witnesses a conflict; disagreement is only
    meaningful while the input words still coincide.
    """
    for i1, i2, b1, b2 in zip(o1.inputs, o2.inputs, o1.outputs, o2.outputs):
        if i1 != i2:
            return False
        if b1 != b2:
            return True
    return False


class ObservationTree:
    """The Reviser's knowledge store.

    Confined to one owner at a time; operations are single-threaded.
    """

    def __init__(self, inputs, outputs, strategy=UpdateStrategy.MOST_RECENT):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.strategy = strategy
        self.root = _Node()
        self._seq = 0
        self._sorted_inputs = sorted(range(len(self.inputs)), key=lambda a: self.inputs[a])

    def lookup(self, word):
        """The stored output word for `word`, following active edges only;
        None when some step is missing.  Never touches the system."""
        node = self.root
        out = []
        for a in word:
            edge = node.active.get(a)
            if edge is None:
                return None
            out.append(edge.output)
            node = edge.child
        return tuple(out)

    def update(self, obs) -> bool:
        """Integrate one observation; True iff it conflicted with the tree."""
        iw, ow = obs
        if len(iw) != len(ow):
            raise ValueError("observation input and output words must have equal length")
        self._seq += 1
        if self.strategy is UpdateStrategy.MOST_RECENT:
            return self._update_recent(iw, ow)
        return self._update_frequent(iw, ow)

    def _update_recent(self, iw, ow):
        node = self.root
        conflict = False
        for a, b in zip(iw, ow):
            edge = node.active.get(a)
            if edge is None:
                edge = _Edge(b, 1, self._seq)
                node.candidates[a] = [edge]
                node.active[a] = edge
            elif edge.output != b:
                # revoke: commit the fresh output and drop the stale subtree
                conflict = True
                edge.output = b
                edge.last_seen = self._seq
                edge.child = _Node()
            node = edge.child
        return conflict

    def _update_frequent(self, iw, ow):
        # The walk follows the *observed* candidates (not necessarily the
        # active ones); a conflict is a winner flip at a node that is still
        # on the active path, since only those change answers already given.
        node = self.root
        conflict = False
        on_active = True
        for a, b in zip(iw, ow):
            cands = node.candidates.get(a)
            if cands is None:
                cands = []
                node.candidates[a] = cands
            prev = node.active.get(a)
            cand = None
            for e in cands:
                if e.output == b:
                    cand = e
                    break
            if cand is None:
                cand = _Edge(b, 0, 0)
                cands.append(cand)
            cand.count += 1
            cand.last_seen = self._seq
            if prev is None or cand.count >= prev.count:  # count ties go to the fresher edge
                node.active[a] = cand
                if on_active and prev is not None and prev.output != b:
                    conflict = True
            on_active = on_active and prev is not None and prev.output == b
            node = cand.child
        return conflict

    def language_maximal(self):
        """The maximal stored observations (root-to-leaf active paths),
        depth-first over sorted input symbols."""

        def walk(node, iw, ow):
            extended = False
            for a in self._sorted_inputs:
                edge = node.active.get(a)
                if edge is not None:
                    extended = True
                    yield from walk(edge.child, iw + (a,), ow + (edge.output,))
            if not extended and iw:
                yield Observation(iw, ow)

        yield from walk(self.root, (), ())

    def language(self):
        """Every stored observation (the full prefix-closed language,
        including the empty observation)."""
        result = {Observation((), ())}
        stack = [(self.root, (), ())]
        while stack:
            node, iw, ow = stack.pop()
            for a, edge in node.active.items():
                obs = Observation(iw + (a,), ow + (edge.output,))
                result.add(obs)
                stack.append((edge.child, obs.inputs, obs.outputs))
        return result

    def node_count(self) -> int:
        count = 0
        stack = [self.root]
        while stack:
            node = stack.pop()
            count += 1
            for cands in node.candidates.values():
                stack.extend(e.child for e in cands)
        return count

    def to_dot(self) -> str:
        """Debug dump in the machine DOT dialect: active edges solid,
        inactive candidates dashed with their counts.  Never parsed back."""
        lines = ["digraph observation_tree {", '\tn0 [shape="point"];']
        ids = {id(self.root): 0}
        next_id = [1]

        def visit(node):
            nid = ids[id(node)]
            for a in self._sorted_inputs:
                for edge in node.candidates.get(a, ()):
                    cid = next_id[0]
                    next_id[0] += 1
                    ids[id(edge.child)] = cid
                    lines.append(f'\tn{cid} [shape="point"];')
                    label = f"{self.inputs[a]} / {self.outputs[edge.output]}"
                    if node.active.get(a) is edge:
                        lines.append(f'\tn{nid} -> n{cid} [label="{label}"];')
                    else:
                        lines.append(
                            f'\tn{nid} -> n{cid} [label="{label} [{edge.count}]" style="dashed"];'
                        )
                    visit(edge.child)

        visit(self.root)
        lines.append("}")
        return "\n".join(lines) + "\n"
