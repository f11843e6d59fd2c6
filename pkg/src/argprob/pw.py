"""The possible-worlds engine: exhaustive enumeration of induced subgraphs.

`pw_probability` realizes the baseline definition of p(E^σ): every subset of
the arguments is visited in increasing binary order (bit i = dense index i),
subsets missing E are skipped without verification, and the surviving
subgraph probabilities are summed.  Preferred semantics is verified per
subgraph with the labelling search; the other semantics use their direct
definitional checks.  The enumeration is chunked so a cooperative deadline
can be honoured without the kernels touching the clock.
"""

from __future__ import annotations

import time
from typing import Iterable, Optional

import numpy as np

from . import _kernels as _k
from .errors import DeadlineExceeded, GraphSizeError
from .graph import PrAG, mask_to_bool
from .semantics import check_semantics

#: Subsets per kernel call; fixed so summation order (and hence the float
#: result) never depends on timing.
CHUNK = 1 << 14


def _clamp(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def subgraph_probability(pg: PrAG, keep: Iterable[str]) -> float:
    """Probability of the possible world where exactly ``keep`` appears:
    the product of kept-argument probabilities times the complements of the
    dropped ones (empty products are 1)."""
    g = pg.graph
    present = mask_to_bool(g.mask_of(keep), g.n)
    return float(np.prod(pg.p[present]) * np.prod(pg.q[~present]))


def pw_probability(pg: PrAG, members: Iterable[str], semantics: str,
                   timeout_s: Optional[float] = None) -> float:
    """p(E^σ) by summing p(G') over every induced subgraph having E among its
    σ-extensions.  Raises `DeadlineExceeded` when ``timeout_s`` elapses."""
    sem = _k.SEM_CODES[check_semantics(semantics)]
    g = pg.graph
    if g.n > 63:
        raise GraphSizeError(
            f"possible-worlds enumeration supports at most 63 arguments, got {g.n}")
    e = g.mask_of(members)
    if g.targets_mask_of_set(e) & e:
        return 0.0  # a conflicting set is an extension of no subgraph
    att, tgt, bits = g.u64_tables()
    e_u = np.uint64(e)
    e_plus = np.uint64(g.targets_mask_of_set(e))
    e_minus = np.uint64(g.attackers_mask_of_set(e))
    stk_in, stk_out = _k.scratch_stacks(g.n)

    deadline = None if timeout_s is None else time.monotonic() + timeout_s
    total = 0.0
    count = 1 << g.n
    for lo in range(0, count, CHUNK):
        if deadline is not None and time.monotonic() > deadline:
            raise DeadlineExceeded()
        total += _k.pw_chunk(att, tgt, bits, g.n, pg.p, pg.q, e_u, e_plus,
                             e_minus, sem, lo, min(lo + CHUNK, count),
                             stk_in, stk_out)
    return _clamp(total)
