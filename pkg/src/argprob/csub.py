"""The characterized-subgraph engine.

Instead of scanning all 2^|A| possible worlds, the qualifying subgraphs for
a conflict-free query set E are described by properties of the decomposition
around E:

* admissible: E present, its unanswered attackers absent, everything else
  free — a closed-form product, no enumeration;
* stable: E present, everything outside E ∪ E⁺ absent — closed form;
* complete: the admissible product times a sum over subsets B' of the
  remaining arguments in which every member of B' is attacked within B';
* preferred: as complete, additionally requiring the subgraph induced by B'
  to have no non-empty admissible set;
* grounded: the complete probability times the mass of the
  attacked-and-attacking subsets that keep E grounded.

The enumerations therefore cost 2^|I| (plus 2^|E⁺∩E⁻| for grounded), with
I the remaining set — the parameter that makes these queries tractable when
the graph is dense or E is large.  `rho` materializes the characterized
families themselves for inspection and testing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from . import _kernels as _k
from .errors import DeadlineExceeded, GraphSizeError
from .graph import ArgumentGraph, Decomposition, PrAG, iter_bits, mask_to_bool
from .pw import CHUNK, _clamp
from .semantics import check_semantics, grounded_extension, has_nonempty_admissible


@dataclass(frozen=True)
class CsubStats:
    """Instrumentation for one characterized-subgraph evaluation.

    ``candidates`` counts every B' enumerated (2^|I| on a completed run),
    ``b2_candidates`` the grounded factor's extra enumeration.  ``max_bprime``
    is |I|, the size of the largest possible candidate.  The two averages
    cover the qualifying sets and all enumerated sets respectively.
    """

    candidates: int
    b2_candidates: int
    max_bprime: int
    avg_bprime_qualifying: Optional[float]
    avg_bprime_enumerated: Optional[float]


_NO_STATS = CsubStats(0, 0, 0, None, None)


def _product(pg: PrAG, present_mask: int, absent_mask: int) -> float:
    n = pg.graph.n
    present = mask_to_bool(present_mask, n)
    absent = mask_to_bool(absent_mask, n)
    return float(np.prod(pg.p[present]) * np.prod(pg.q[absent]))


def _base_product(pg: PrAG, d: Decomposition) -> float:
    # P_E: members present, unanswered attackers absent
    return _product(pg, d.e_mask, d.attackers_only_mask)


def _conflicting(pg: PrAG, members: Iterable[str]) -> tuple[int, bool]:
    g = pg.graph
    e = g.mask_of(members)
    return e, bool(g.targets_mask_of_set(e) & e)


def _compact_tables(g: ArgumentGraph, universe_mask: int):
    """Re-index a sub-universe to positions 0..k-1 with internal adjacency."""
    idxs = list(iter_bits(universe_mask))
    pos = {gi: k for k, gi in enumerate(idxs)}
    k = len(idxs)
    att = np.zeros(k, dtype=np.uint64)
    tgt = np.zeros(k, dtype=np.uint64)
    for slot, gi in enumerate(idxs):
        am = 0
        for j in iter_bits(g.attacker_mask(gi) & universe_mask):
            am |= 1 << pos[j]
        tm = 0
        for j in iter_bits(g.target_mask(gi) & universe_mask):
            tm |= 1 << pos[j]
        att[slot] = am
        tgt[slot] = tm
    bits = np.array([1 << i for i in range(k)], dtype=np.uint64)
    return idxs, att, tgt, bits


def _remaining_sum(pg: PrAG, d: Decomposition, need_adm: bool,
                   deadline: Optional[float], collect: bool):
    """Σ over qualifying B' ⊆ I of the in/out probability products."""
    g = pg.graph
    idxs, att, tgt, bits = _compact_tables(g, d.remaining_mask)
    n_i = len(idxs)
    if n_i > 63:
        raise GraphSizeError(
            f"remaining set has {n_i} arguments; enumeration supports at most 63")
    p_in = np.ascontiguousarray(pg.p[idxs]) if idxs else np.zeros(0)
    p_out = np.ascontiguousarray(pg.q[idxs]) if idxs else np.zeros(0)
    stk_in, stk_out = _k.scratch_stacks(n_i)

    total = 0.0
    enum_count = enum_sizes = qual_count = qual_sizes = 0
    count = 1 << n_i
    for lo in range(0, count, CHUNK):
        if deadline is not None and time.monotonic() > deadline:
            raise DeadlineExceeded(stats=_make_stats(
                enum_count, enum_sizes, qual_count, qual_sizes, n_i, 0)
                if collect else None)
        part, ec, es, qc, qs = _k.csub_chunk(
            att, tgt, bits, n_i, p_in, p_out, need_adm,
            lo, min(lo + CHUNK, count), stk_in, stk_out)
        total += part
        enum_count += int(ec)
        enum_sizes += int(es)
        qual_count += int(qc)
        qual_sizes += int(qs)
    return total, (enum_count, enum_sizes, qual_count, qual_sizes, n_i)


def _make_stats(enum_count, enum_sizes, qual_count, qual_sizes, n_i,
                b2_candidates) -> CsubStats:
    return CsubStats(
        candidates=enum_count,
        b2_candidates=b2_candidates,
        max_bprime=n_i,
        avg_bprime_qualifying=(qual_sizes / qual_count) if qual_count else None,
        avg_bprime_enumerated=(enum_sizes / enum_count) if enum_count else None,
    )


def p_admissible(pg: PrAG, members: Iterable[str]) -> float:
    """Closed form: members present times unanswered attackers absent."""
    e, conflict = _conflicting(pg, members)
    if conflict:
        return 0.0
    d = pg.graph.decompose_mask(e)
    return _clamp(_base_product(pg, d))


def p_stable(pg: PrAG, members: Iterable[str]) -> float:
    """Closed form: members present, everything they do not attack absent."""
    e, conflict = _conflicting(pg, members)
    if conflict:
        return 0.0
    g = pg.graph
    absent = g.full_mask & ~e & ~g.targets_mask_of_set(e)
    return _clamp(_product(pg, e, absent))


def _p_enumerating(pg: PrAG, members, need_adm, deadline, instrument):
    e, conflict = _conflicting(pg, members)
    if conflict:
        return 0.0, _NO_STATS
    d = pg.graph.decompose_mask(e)
    base = _base_product(pg, d)
    if base == 0.0:
        # a forced-present argument with p=0 (or forced-absent with p=1)
        return 0.0, _make_stats(0, 0, 0, 0, d.remaining_mask.bit_count(), 0)
    sigma, raw = _remaining_sum(pg, d, need_adm, deadline, instrument)
    return _clamp(base * sigma), _make_stats(*raw, 0)


def p_complete(pg: PrAG, members: Iterable[str],
               timeout_s: Optional[float] = None, instrument: bool = False):
    """P_E times the mass of internally-attacked subsets of the remaining
    arguments; enumeration is over 2^|I| only."""
    deadline = None if timeout_s is None else time.monotonic() + timeout_s
    prob, stats = _p_enumerating(pg, members, False, deadline, instrument)
    return (prob, stats) if instrument else prob


def p_preferred(pg: PrAG, members: Iterable[str],
                timeout_s: Optional[float] = None, instrument: bool = False):
    """As `p_complete`, with candidates additionally required to induce a
    subgraph whose only admissible set is empty."""
    deadline = None if timeout_s is None else time.monotonic() + timeout_s
    prob, stats = _p_enumerating(pg, members, True, deadline, instrument)
    return (prob, stats) if instrument else prob


def _grounded_factor(pg: PrAG, d: Decomposition, deadline, instrument,
                     co_raw) -> tuple[float, int]:
    """Mass of B''₂ ⊆ E⁺∩E⁻ for which E stays the grounded extension of the
    subgraph induced by E ∪ B''₂."""
    g = pg.graph
    aa = d.attacked_and_attacking_mask
    cand_global = list(iter_bits(aa))
    k = len(cand_global)
    if k > 63:
        raise GraphSizeError(
            f"attacked-and-attacking set has {k} arguments; "
            "enumeration supports at most 63")
    universe = d.e_mask | aa
    p_in = pg.p[cand_global] if cand_global else np.zeros(0)
    p_out = pg.q[cand_global] if cand_global else np.zeros(0)

    total = 0.0
    done = 0
    count = 1 << k
    if universe.bit_count() <= 63:
        idxs, att, tgt, bits = _compact_tables(g, universe)
        pos = {gi: slot for slot, gi in enumerate(idxs)}
        e_local = np.uint64(sum(1 << pos[i] for i in iter_bits(d.e_mask)))
        cand_pos = np.array([pos[i] for i in cand_global], dtype=np.int64)
        for lo in range(0, count, CHUNK):
            if deadline is not None and time.monotonic() > deadline:
                raise DeadlineExceeded(stats=_make_stats(*co_raw, done)
                                       if instrument else None)
            part, c = _k.csub_gr_chunk(att, tgt, bits, len(idxs), e_local,
                                       cand_pos, p_in, p_out, lo,
                                       min(lo + CHUNK, count))
            total += part
            done += int(c)
    else:
        # universe too wide for machine-word kernels: big-int fixpoint
        from .semantics import _grounded_fixpoint
        for s in range(count):
            if deadline is not None and s % CHUNK == 0 \
                    and time.monotonic() > deadline:
                raise DeadlineExceeded(stats=_make_stats(*co_raw, done)
                                       if instrument else None)
            m = d.e_mask
            term = 1.0
            for kk, gi in enumerate(cand_global):
                if (s >> kk) & 1:
                    m |= 1 << gi
                    term *= float(p_in[kk])
                else:
                    term *= float(p_out[kk])
            done += 1
            if _grounded_fixpoint(g, m) == d.e_mask:
                total += term
    return total, done


def p_grounded(pg: PrAG, members: Iterable[str],
               timeout_s: Optional[float] = None, instrument: bool = False):
    """The complete-semantics probability times the grounded correction
    factor over the attacked-and-attacking arguments."""
    deadline = None if timeout_s is None else time.monotonic() + timeout_s
    e, conflict = _conflicting(pg, members)
    if conflict:
        return (0.0, _NO_STATS) if instrument else 0.0
    d = pg.graph.decompose_mask(e)
    base = _base_product(pg, d)
    if base == 0.0:
        stats = _make_stats(0, 0, 0, 0, d.remaining_mask.bit_count(), 0)
        return (0.0, stats) if instrument else 0.0
    sigma, raw = _remaining_sum(pg, d, False, deadline, instrument)
    pco = base * sigma
    if pco == 0.0:
        stats = _make_stats(*raw, 0)
        return (0.0, stats) if instrument else 0.0
    factor, b2 = _grounded_factor(pg, d, deadline, instrument, raw)
    prob = _clamp(pco * factor)
    return (prob, _make_stats(*raw, b2)) if instrument else prob


def csub_probability(pg: PrAG, members: Iterable[str], semantics: str,
                     timeout_s: Optional[float] = None,
                     instrument: bool = False):
    """Dispatch to the per-semantics characterized-subgraph formulas.

    With ``instrument`` the enumerating semantics return (probability,
    `CsubStats`); the closed forms return (probability, None).
    """
    check_semantics(semantics)
    if semantics == "ad":
        prob = p_admissible(pg, members)
        return (prob, None) if instrument else prob
    if semantics == "st":
        prob = p_stable(pg, members)
        return (prob, None) if instrument else prob
    if semantics == "co":
        return p_complete(pg, members, timeout_s, instrument)
    if semantics == "pr":
        return p_preferred(pg, members, timeout_s, instrument)
    return p_grounded(pg, members, timeout_s, instrument)


def rho(pg: PrAG, members: Iterable[str], semantics: str) -> Iterator[frozenset[str]]:
    """Lazily yield the argument sets of the characterized σ-subgraphs.

    Empty for a conflicting query set.  Membership tests follow the
    characterizations: the internally-attacked filter for complete, the
    no-non-empty-admissible test on the induced remaining part for
    preferred, and the grounded-extension test on E ∪ B''₂ for grounded.
    """
    check_semantics(semantics)
    g = pg.graph
    e = g.mask_of(members)
    if g.targets_mask_of_set(e) & e:
        return
    d = g.decompose_mask(e)
    if semantics == "st":
        free = list(iter_bits(d.attacked_mask))
    else:
        free = list(iter_bits(d.remaining_mask | d.attacked_mask))
    e_names = g.names_of(e)
    i_mask = d.remaining_mask
    aa_mask = d.attacked_and_attacking_mask
    for s in range(1 << len(free)):
        b = 0
        for slot, gi in enumerate(free):
            if (s >> slot) & 1:
                b |= 1 << gi
        if semantics in ("co", "pr", "gr"):
            bp = b & i_mask
            if any(g.attacker_mask(i) & bp == 0 for i in iter_bits(bp)):
                continue
            if semantics == "pr":
                part = g.induced_subgraph(g.names_of(bp))
                if has_nonempty_admissible(part):
                    continue
            elif semantics == "gr":
                part = g.induced_subgraph(g.names_of(e | (b & aa_mask)))
                if grounded_extension(part) != e_names:
                    continue
        yield g.names_of(e | b)
