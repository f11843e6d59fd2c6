"""Argument graphs, probabilistic argument graphs, and set machinery.

Arguments are identified by name.  Internally every set of arguments is a
dense bitmask over indices 0..n-1 assigned in lexicographic name order, so
set algebra costs O(n/64) per operation and every "pick some argument" step
is deterministic (lowest index first).  Graphs are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import GraphSizeError, NotConflictFreeError, UnknownArgumentError

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")

# Bitmask kernels index arguments with single-word masks.
MASK_WORD_BITS = 63


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set-bit indices of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_to_bool(mask: int, n: int) -> np.ndarray:
    """Dense bitmask -> boolean numpy array of length ``n``."""
    if n == 0:
        return np.zeros(0, dtype=bool)
    raw = mask.to_bytes((n + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8),
                         count=n, bitorder="little").astype(bool)


class ArgumentGraph:
    """A finite directed attack graph (self-attacks allowed)."""

    __slots__ = ("names", "n", "attacks", "full_mask",
                 "_index", "_attacker_masks", "_target_masks", "_u64")

    def __init__(self, arguments: Iterable[str],
                 attacks: Iterable[tuple[str, str]] = ()):
        names = list(arguments)
        seen = set()
        for name in names:
            if not isinstance(name, str) or not _NAME_RE.match(name):
                raise ValueError(f"invalid argument name: {name!r}")
            if name in seen:
                raise ValueError(f"duplicate argument: {name!r}")
            seen.add(name)
        self.names: tuple[str, ...] = tuple(sorted(names))
        self.n = len(self.names)
        self._index = {a: i for i, a in enumerate(self.names)}
        self.full_mask = (1 << self.n) - 1

        attacker_masks = [0] * self.n
        target_masks = [0] * self.n
        pairs = set()
        for frm, to in attacks:
            i, j = self.index_of(frm), self.index_of(to)
            pairs.add((frm, to))
            target_masks[i] |= 1 << j
            attacker_masks[j] |= 1 << i
        self.attacks: frozenset[tuple[str, str]] = frozenset(pairs)
        self._attacker_masks = tuple(attacker_masks)
        self._target_masks = tuple(target_masks)
        self._u64 = None

    # -- identity ---------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, ArgumentGraph)
                and self.names == other.names
                and self.attacks == other.attacks)

    def __hash__(self):
        return hash((self.names, self.attacks))

    def __repr__(self):
        return f"ArgumentGraph({len(self.names)} arguments, {len(self.attacks)} attacks)"

    # -- name/index/mask conversions ---------------------------------------

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownArgumentError(name) from None

    def mask_of(self, members: Iterable[str]) -> int:
        mask = 0
        for name in members:
            mask |= 1 << self.index_of(name)
        return mask

    def names_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.names[i] for i in iter_bits(mask))

    def attacker_mask(self, i: int) -> int:
        return self._attacker_masks[i]

    def target_mask(self, i: int) -> int:
        return self._target_masks[i]

    def attackers_mask_of_set(self, mask: int) -> int:
        out = 0
        for i in iter_bits(mask):
            out |= self._attacker_masks[i]
        return out

    def targets_mask_of_set(self, mask: int) -> int:
        out = 0
        for i in iter_bits(mask):
            out |= self._target_masks[i]
        return out

    # -- neighbourhood operators -------------------------------------------

    def attackers_of(self, name: str) -> frozenset[str]:
        """The arguments attacking ``name``."""
        return self.names_of(self._attacker_masks[self.index_of(name)])

    def set_attackers(self, members: Iterable[str]) -> frozenset[str]:
        """Union of the attackers of every member."""
        return self.names_of(self.attackers_mask_of_set(self.mask_of(members)))

    def set_attacked(self, members: Iterable[str]) -> frozenset[str]:
        """Union of the targets of every member."""
        return self.names_of(self.targets_mask_of_set(self.mask_of(members)))

    # -- subgraphs and basic predicates --------------------------------------

    def induced_subgraph(self, keep: Iterable[str]) -> "ArgumentGraph":
        """Restrict the graph to ``keep`` and the attacks between them."""
        kept = self.names_of(self.mask_of(keep))
        attacks = [(a, b) for (a, b) in self.attacks if a in kept and b in kept]
        return ArgumentGraph(kept, attacks)

    def is_conflict_free(self, members: Iterable[str]) -> bool:
        mask = self.mask_of(members)
        return self.targets_mask_of_set(mask) & mask == 0

    def is_acceptable(self, members: Iterable[str], name: str) -> bool:
        """True iff every attacker of ``name`` is attacked by the set."""
        mask = self.mask_of(members)
        attackers = self._attacker_masks[self.index_of(name)]
        return attackers & ~self.targets_mask_of_set(mask) == 0

    def decompose(self, members: Iterable[str]) -> "Decomposition":
        """Partition the graph around a conflict-free query set."""
        return self.decompose_mask(self.mask_of(members))

    def decompose_mask(self, e_mask: int) -> "Decomposition":
        e_plus = self.targets_mask_of_set(e_mask)
        if e_plus & e_mask:
            raise NotConflictFreeError(
                f"set {sorted(self.names_of(e_mask))} is not conflict-free")
        e_minus = self.attackers_mask_of_set(e_mask)
        remaining = self.full_mask & ~(e_mask | e_plus | e_minus)
        return Decomposition(
            graph=self,
            e_mask=e_mask,
            attackers_only_mask=e_minus & ~e_plus,
            attacked_mask=e_plus,
            remaining_mask=remaining,
            attacked_only_mask=e_plus & ~e_minus,
            attacked_and_attacking_mask=e_plus & e_minus,
        )

    # -- kernel tables --------------------------------------------------------

    def u64_tables(self):
        """(attackers, targets, bits) as uint64 arrays for the mask kernels.

        Cached; only graphs with at most 63 arguments fit a machine word.
        """
        if self._u64 is None:
            if self.n > MASK_WORD_BITS:
                raise GraphSizeError(
                    f"bitmask kernels support at most {MASK_WORD_BITS} "
                    f"arguments, got {self.n}")
            att = np.array(self._attacker_masks, dtype=np.uint64)
            tgt = np.array(self._target_masks, dtype=np.uint64)
            bits = np.array([1 << i for i in range(self.n)], dtype=np.uint64)
            self._u64 = (att, tgt, bits)
        return self._u64


@dataclass(frozen=True)
class Decomposition:
    """The four-component partition of a graph around a query set E.

    ``e``, ``attackers_only`` (attackers of E that E does not attack back),
    ``attacked`` (everything E attacks) and ``remaining`` partition the
    arguments; ``attacked`` further splits into ``attacked_only`` and
    ``attacked_and_attacking``.
    """

    graph: ArgumentGraph
    e_mask: int
    attackers_only_mask: int
    attacked_mask: int
    remaining_mask: int
    attacked_only_mask: int
    attacked_and_attacking_mask: int

    @property
    def e(self) -> frozenset[str]:
        return self.graph.names_of(self.e_mask)

    @property
    def attackers_only(self) -> frozenset[str]:
        return self.graph.names_of(self.attackers_only_mask)

    @property
    def attacked(self) -> frozenset[str]:
        return self.graph.names_of(self.attacked_mask)

    @property
    def remaining(self) -> frozenset[str]:
        return self.graph.names_of(self.remaining_mask)

    @property
    def attacked_only(self) -> frozenset[str]:
        return self.graph.names_of(self.attacked_only_mask)

    @property
    def attacked_and_attacking(self) -> frozenset[str]:
        return self.graph.names_of(self.attacked_and_attacking_mask)


class PrAG:
    """A probabilistic argument graph: every argument carries an independent
    probability of appearing."""

    __slots__ = ("graph", "p", "q")

    def __init__(self, graph: ArgumentGraph, probabilities: Mapping[str, float]):
        extra = set(probabilities) - set(graph.names)
        if extra:
            raise ValueError(f"probabilities for unknown arguments: {sorted(extra)}")
        missing = set(graph.names) - set(probabilities)
        if missing:
            raise ValueError(f"missing probabilities for: {sorted(missing)}")
        values = [float(probabilities[a]) for a in graph.names]
        for name, v in zip(graph.names, values):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"probability of {name!r} out of range: {v}")
        self.graph = graph
        self.p = np.array(values, dtype=np.float64)
        self.q = 1.0 - self.p

    def probability_of(self, name: str) -> float:
        return float(self.p[self.graph.index_of(name)])

    def as_mapping(self) -> dict[str, float]:
        return {a: float(v) for a, v in zip(self.graph.names, self.p)}

    def __eq__(self, other):
        return (isinstance(other, PrAG)
                and self.graph == other.graph
                and np.array_equal(self.p, other.p))

    def __hash__(self):
        return hash((self.graph, self.p.tobytes()))

    def __repr__(self):
        return f"PrAG({self.graph!r})"
