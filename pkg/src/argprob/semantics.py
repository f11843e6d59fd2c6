"""Classical Dung semantics and the labelling machinery.

Two independent routes to the same answers live here:

* direct definitional checks (`is_extension`, `enumerate_extensions`,
  `grounded_extension`) — deliberately brute-force, they are the test
  oracle, not the fast path;
* the labelling route (`transition_step`, `verify_preferred_labelling`,
  `has_nonempty_admissible`) — the recursive verification procedures the
  enumeration engines mirror in their bitmask kernels.

Everything is a pure function over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import GraphSizeError
from .graph import ArgumentGraph, iter_bits

#: The five supported semantics identifiers.
SEMANTICS = ("ad", "co", "pr", "gr", "st")

#: `enumerate_extensions` refuses anything bigger; it exists to be trusted,
#: not to be fast.
ENUMERATION_LIMIT = 25


def check_semantics(semantics: str) -> str:
    if semantics not in SEMANTICS:
        raise ValueError(f"unknown semantics {semantics!r}, expected one of {SEMANTICS}")
    return semantics


class Label(Enum):
    IN = "IN"
    OUT = "OUT"
    UNDEC = "UNDEC"


class Legality(Enum):
    LEGAL = "LEGAL"
    ILLEGAL = "ILLEGAL"


@dataclass(frozen=True)
class Labelling:
    """A total IN/OUT/UNDEC assignment over a graph's arguments.

    Stored as the (in, out) bitmask pair; everything not IN or OUT is UNDEC.
    """

    graph: ArgumentGraph
    in_mask: int
    out_mask: int

    def __post_init__(self):
        full = self.graph.full_mask
        if self.in_mask & ~full or self.out_mask & ~full:
            raise ValueError("labelling mentions arguments outside the graph")
        if self.in_mask & self.out_mask:
            raise ValueError("an argument cannot be both IN and OUT")

    @classmethod
    def all_in(cls, graph: ArgumentGraph) -> "Labelling":
        return cls(graph, graph.full_mask, 0)

    @classmethod
    def from_sets(cls, graph: ArgumentGraph, in_args: Iterable[str],
                  out_args: Iterable[str]) -> "Labelling":
        return cls(graph, graph.mask_of(in_args), graph.mask_of(out_args))

    @property
    def undec_mask(self) -> int:
        return self.graph.full_mask & ~self.in_mask & ~self.out_mask

    @property
    def in_args(self) -> frozenset[str]:
        return self.graph.names_of(self.in_mask)

    @property
    def out_args(self) -> frozenset[str]:
        return self.graph.names_of(self.out_mask)

    @property
    def undec_args(self) -> frozenset[str]:
        return self.graph.names_of(self.undec_mask)

    def label_of(self, name: str) -> Label:
        bit = 1 << self.graph.index_of(name)
        if self.in_mask & bit:
            return Label.IN
        if self.out_mask & bit:
            return Label.OUT
        return Label.UNDEC

    def as_triple(self):
        return (self.in_args, self.out_args, self.undec_args)


# ---------------------------------------------------------------------------
# labelling classification
# ---------------------------------------------------------------------------

def _illegal_in_mask(g: ArgumentGraph, in_mask: int, out_mask: int) -> int:
    """IN arguments with some attacker not labelled OUT."""
    out = 0
    for i in iter_bits(in_mask):
        if g.attacker_mask(i) & ~out_mask:
            out |= 1 << i
    return out


def _super_illegal_in_mask(g: ArgumentGraph, in_mask: int, out_mask: int) -> int:
    """Illegally-IN arguments attacked by a legally-IN or UNDEC argument."""
    illegal = _illegal_in_mask(g, in_mask, out_mask)
    if not illegal:
        return 0
    legal_in = in_mask & ~illegal
    undec = g.full_mask & ~in_mask & ~out_mask
    witness = legal_in | undec
    out = 0
    for i in iter_bits(illegal):
        if g.attacker_mask(i) & witness:
            out |= 1 << i
    return out


def label_legality(labelling: Labelling, name: str) -> Legality:
    """Classify the label currently assigned to ``name``.

    IN is legal when all attackers are OUT; OUT when some attacker is IN;
    UNDEC when no attacker is IN but not all attackers are OUT.
    """
    g = labelling.graph
    attackers = g.attacker_mask(g.index_of(name))
    label = labelling.label_of(name)
    if label is Label.IN:
        legal = attackers & ~labelling.out_mask == 0
    elif label is Label.OUT:
        legal = attackers & labelling.in_mask != 0
    else:
        legal = (attackers & ~labelling.out_mask != 0
                 and attackers & labelling.in_mask == 0)
    return Legality.LEGAL if legal else Legality.ILLEGAL


def super_illegally_in(labelling: Labelling) -> frozenset[str]:
    g = labelling.graph
    return g.names_of(
        _super_illegal_in_mask(g, labelling.in_mask, labelling.out_mask))


def _transition_masks(g: ArgumentGraph, in_mask: int, out_mask: int,
                      i: int) -> tuple[int, int]:
    bit = 1 << i
    new_in = in_mask & ~bit
    new_out = out_mask | bit
    # the relabelled argument and its targets may have become illegally OUT
    for j in iter_bits((bit | g.target_mask(i)) & new_out):
        if g.attacker_mask(j) & new_in == 0:
            new_out &= ~(1 << j)
    return new_in, new_out


def transition_step(labelling: Labelling, name: str) -> Labelling:
    """Relabel an illegally-IN argument OUT, then fix any illegally-OUT
    argument among it and its targets to UNDEC.  Pure: returns a new
    labelling."""
    g = labelling.graph
    i = g.index_of(name)
    bit = 1 << i
    if not labelling.in_mask & bit:
        raise ValueError(f"{name!r} is not labelled IN")
    if not _illegal_in_mask(g, labelling.in_mask, labelling.out_mask) & bit:
        raise ValueError(f"{name!r} is not illegally IN")
    new_in, new_out = _transition_masks(g, labelling.in_mask, labelling.out_mask, i)
    return Labelling(g, new_in, new_out)


# ---------------------------------------------------------------------------
# direct definitional checks (the oracle route)
# ---------------------------------------------------------------------------

def _conflict_free(g: ArgumentGraph, e: int) -> bool:
    return g.targets_mask_of_set(e) & e == 0


def _admissible(g: ArgumentGraph, e: int, sub: int) -> bool:
    if not _conflict_free(g, e):
        return False
    defended = g.targets_mask_of_set(e)
    return g.attackers_mask_of_set(e) & sub & ~defended == 0


def _complete(g: ArgumentGraph, e: int, sub: int) -> bool:
    if not _admissible(g, e, sub):
        return False
    defended = g.targets_mask_of_set(e)
    for i in iter_bits(sub & ~e):
        if g.attacker_mask(i) & sub & ~defended == 0:
            return False  # acceptable w.r.t. e but missing from it
    return True


def _stable(g: ArgumentGraph, e: int, sub: int) -> bool:
    if not _conflict_free(g, e):
        return False
    return sub & ~e & ~g.targets_mask_of_set(e) == 0


def _preferred(g: ArgumentGraph, e: int, sub: int) -> bool:
    if not _admissible(g, e, sub):
        return False
    free = sub & ~e
    s = free
    while s:
        if _admissible(g, e | s, sub):
            return False
        s = (s - 1) & free
    return True


def _grounded_fixpoint(g: ArgumentGraph, sub: int) -> int:
    """Least fixpoint of "add everything acceptable w.r.t. the current set",
    restricted to the induced subgraph on ``sub``."""
    current = 0
    defended = 0
    while True:
        nxt = 0
        for i in iter_bits(sub):
            if g.attacker_mask(i) & sub & ~defended == 0:
                nxt |= 1 << i
        if nxt == current:
            return current
        current = nxt
        defended = g.targets_mask_of_set(current) & sub


def _is_extension_mask(g: ArgumentGraph, e: int, sub: int, semantics: str) -> bool:
    if e & ~sub:
        return False
    if semantics == "ad":
        return _admissible(g, e, sub)
    if semantics == "co":
        return _complete(g, e, sub)
    if semantics == "pr":
        return _preferred(g, e, sub)
    if semantics == "gr":
        return _grounded_fixpoint(g, sub) == e
    return _stable(g, e, sub)


def is_extension(g: ArgumentGraph, members: Iterable[str], semantics: str) -> bool:
    """Decide E being a σ-extension straight from the definitions."""
    check_semantics(semantics)
    return _is_extension_mask(g, g.mask_of(members), g.full_mask, semantics)


def grounded_extension(g: ArgumentGraph) -> frozenset[str]:
    """The unique grounded extension (least fixpoint of the defense operator)."""
    return g.names_of(_grounded_fixpoint(g, g.full_mask))


def enumerate_extensions(g: ArgumentGraph, semantics: str) -> set[frozenset[str]]:
    """All σ-extensions, by checking every subset of the arguments.

    Brute force on purpose; refuses graphs with more than
    ``ENUMERATION_LIMIT`` arguments.
    """
    check_semantics(semantics)
    if g.n > ENUMERATION_LIMIT:
        raise GraphSizeError(
            f"enumeration over 2^{g.n} subsets refused "
            f"(limit {ENUMERATION_LIMIT} arguments)")
    full = g.full_mask
    if semantics == "pr":
        # maximal admissible sets, scanning by decreasing size so a set is
        # preferred exactly when no already-kept extension contains it
        admissible = [m for m in range(full + 1) if _admissible(g, m, full)]
        admissible.sort(key=lambda m: m.bit_count(), reverse=True)
        kept: list[int] = []
        for m in admissible:
            if not any(m & ~k == 0 for k in kept):
                kept.append(m)
        return {g.names_of(m) for m in kept}
    if semantics == "gr":
        return {g.names_of(_grounded_fixpoint(g, full))}
    return {g.names_of(m) for m in range(full + 1)
            if _is_extension_mask(g, m, full, semantics)}


# ---------------------------------------------------------------------------
# the labelling route (verification procedures)
# ---------------------------------------------------------------------------

def _verify_preferred(g: ArgumentGraph, in_mask: int, out_mask: int, e: int) -> bool:
    illegal = _illegal_in_mask(g, in_mask, out_mask)
    legal_in = in_mask & ~illegal
    undec = g.full_mask & ~in_mask & ~out_mask
    witness = legal_in | undec
    sup = 0
    for i in iter_bits(illegal):
        if g.attacker_mask(i) & witness:
            sup |= 1 << i
    # the rejections only mean anything while e is still fully IN: IN sets
    # shrink monotonically, so a state that dropped a member of e can
    # witness nothing about e
    preserved = e & ~in_mask == 0
    if preserved and sup & e:
        return False
    if not illegal:
        # terminal labelling: in(L) is admissible; reject strict supersets
        return not (preserved and in_mask != e)
    if sup:
        choices = [(sup & -sup).bit_length() - 1]
    else:
        choices = list(iter_bits(illegal))
    for i in choices:
        new_in, new_out = _transition_masks(g, in_mask, out_mask, i)
        if not _verify_preferred(g, new_in, new_out, e):
            return False
    return True


def verify_preferred_labelling(labelling: Labelling, members: Iterable[str]) -> bool:
    """True iff the set is a preferred extension of the labelling's graph.

    ``labelling`` must be the initial all-IN labelling.  The search applies
    transition steps (on the lexicographically smallest super-illegally-IN
    argument when one exists, otherwise branching over every illegally-IN
    argument) and rejects when a super-illegally-IN argument lies inside the
    query set, or when a terminal labelling's IN set strictly contains it.
    Both rejections apply only while the query set is still fully IN;
    branches that dropped a member are explored but inert, since IN sets
    only shrink.  Conflicting sets are rejected up front; the recursion's
    input contract assumes conflict-freeness.
    """
    g = labelling.graph
    if labelling.in_mask != g.full_mask or labelling.out_mask != 0:
        raise ValueError("verification starts from the all-IN labelling")
    e = g.mask_of(members)
    if not _conflict_free(g, e):
        return False
    return _verify_preferred(g, g.full_mask, 0, e)


def _verify_nonempty_adm(g: ArgumentGraph, in_mask: int, out_mask: int) -> bool:
    illegal = _illegal_in_mask(g, in_mask, out_mask)
    if not illegal:
        return in_mask != 0
    sup = _super_illegal_in_mask(g, in_mask, out_mask)
    if sup:
        choices = [(sup & -sup).bit_length() - 1]
    else:
        choices = list(iter_bits(illegal))
    for i in choices:
        new_in, new_out = _transition_masks(g, in_mask, out_mask, i)
        if _verify_nonempty_adm(g, new_in, new_out):
            return True
    return False


def has_nonempty_admissible(g: ArgumentGraph) -> bool:
    """True iff the graph has a non-empty admissible set, found by the same
    transition-step search starting from all-IN: any terminal labelling with
    a non-empty IN set witnesses one."""
    return _verify_nonempty_adm(g, g.full_mask, 0)


def preferred_extensions_via_labelling(g: ArgumentGraph) -> set[frozenset[str]]:
    """Preferred extensions recovered through the labelling verifier — a
    cross-check for `enumerate_extensions`, bounded the same way."""
    if g.n > ENUMERATION_LIMIT:
        raise GraphSizeError(
            f"enumeration over 2^{g.n} subsets refused "
            f"(limit {ENUMERATION_LIMIT} arguments)")
    found = set()
    for m in range(g.full_mask + 1):
        if _conflict_free(g, m) and _verify_preferred(g, g.full_mask, 0, m):
            found.add(g.names_of(m))
    return found
