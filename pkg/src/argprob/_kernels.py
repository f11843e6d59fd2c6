"""Bitmask kernels behind the two probability engines.

Each kernel is written once, as plain Python over numpy uint64 scalars, and
JIT-compiled with numba when available.  Set ``ARGPROB_JIT=0`` to force the
pure-numpy interpretation of the same source (useful for debugging and as a
numba-free fallback), ``ARGPROB_JIT=1`` to require numba; the default
("auto") compiles when numba imports.  Both paths execute the identical
sequence of float operations, so results are bit-identical across backends.

Masks index arguments by their dense position; kernels therefore only ever
see graphs (or enumeration universes) of at most 63 arguments.  Labelling
searches run depth-first with explicit stacks: a transition step removes one
IN label, so depth is bounded by the universe size and the stack by its
square.
"""

from __future__ import annotations

import os

import numpy as np

_ENV = os.environ.get("ARGPROB_JIT", "auto").strip().lower()
if _ENV in ("0", "off", "false", "no"):
    JIT_ENABLED = False
elif _ENV in ("1", "on", "true", "yes", "require"):
    from numba import njit  # hard requirement when forced on

    JIT_ENABLED = True
else:
    try:
        from numba import njit

        JIT_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        JIT_ENABLED = False


def backend() -> str:
    """Name of the active kernel backend: "numba" or "numpy"."""
    return "numba" if JIT_ENABLED else "numpy"


# semantics dispatch codes
SEM_AD, SEM_CO, SEM_PR, SEM_GR, SEM_ST = 0, 1, 2, 3, 4
SEM_CODES = {"ad": SEM_AD, "co": SEM_CO, "pr": SEM_PR, "gr": SEM_GR, "st": SEM_ST}

U0 = np.uint64(0)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_M7F = np.uint64(0x7F)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S8 = np.uint64(8)
_S16 = np.uint64(16)
_S32 = np.uint64(32)


def scratch_stacks(n: int):
    """DFS scratch for a universe of ``n`` arguments."""
    cap = n * (n + 1) + 2
    return np.zeros(cap, dtype=np.uint64), np.zeros(cap, dtype=np.uint64)


def popcount(x):
    # overflow-free SWAR; identical in compiled and interpreted modes
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    x = x + (x >> _S8)
    x = x + (x >> _S16)
    x = x + (x >> _S32)
    return np.int64(x & _M7F)


def grounded_fixpoint(att, tgt, bits, n, sub):
    """Grounded extension of the subgraph on ``sub``, as a mask."""
    current = U0
    defended = U0
    while True:
        nxt = U0
        for i in range(n):
            if sub & bits[i] != U0 and att[i] & sub & ~defended == U0:
                nxt |= bits[i]
        if nxt == current:
            return current
        current = nxt
        defended = U0
        for i in range(n):
            if current & bits[i] != U0:
                defended |= tgt[i] & sub


def verify_preferred(att, tgt, bits, n, sub, e, stk_in, stk_out):
    """Transition-step search from all-IN over ``sub``; True iff no reachable
    state rejects ``e`` (assumed conflict-free and contained in ``sub``).

    The search branches on every illegally-IN argument (or on the single
    lowest super-illegally-IN one when any exists) regardless of ``e``.  The
    two rejections — a super-illegally-IN member of ``e``, or a terminal IN
    set strictly containing ``e`` — only apply while ``e`` is still fully
    IN: IN sets shrink monotonically, so a state that dropped a member of
    ``e`` can witness nothing about it.
    """
    stk_in[0] = sub
    stk_out[0] = U0
    top = 1
    while top > 0:
        top -= 1
        cin = stk_in[top]
        cout = stk_out[top]
        illegal = U0
        legal = U0
        for i in range(n):
            b = bits[i]
            if cin & b != U0:
                if att[i] & sub & ~cout != U0:
                    illegal |= b
                else:
                    legal |= b
        preserved = e & ~cin == U0
        sup = U0
        if illegal != U0:
            witness = legal | (sub & ~cin & ~cout)
            for i in range(n):
                b = bits[i]
                if illegal & b != U0 and att[i] & sub & witness != U0:
                    sup |= b
        if preserved and sup & e != U0:
            return False  # a member of e is super-illegally IN
        if illegal == U0:
            if preserved and cin != e:
                return False
            continue
        pick = sup if sup != U0 else illegal
        one_choice = sup != U0
        for i in range(n):
            b = bits[i]
            if pick & b == U0:
                continue
            new_in = cin & ~b
            new_out = cout | b
            fix = (b | (tgt[i] & sub)) & new_out
            for j in range(n):
                bj = bits[j]
                if fix & bj != U0 and att[j] & sub & new_in == U0:
                    new_out &= ~bj
            stk_in[top] = new_in
            stk_out[top] = new_out
            top += 1
            if one_choice:
                break
    return True


def nonempty_admissible(att, tgt, bits, n, sub, stk_in, stk_out):
    """True iff the subgraph on ``sub`` has a non-empty admissible set."""
    stk_in[0] = sub
    stk_out[0] = U0
    top = 1
    while top > 0:
        top -= 1
        cin = stk_in[top]
        cout = stk_out[top]
        illegal = U0
        legal = U0
        for i in range(n):
            b = bits[i]
            if cin & b != U0:
                if att[i] & sub & ~cout != U0:
                    illegal |= b
                else:
                    legal |= b
        if illegal == U0:
            if cin != U0:
                return True
            continue
        sup = U0
        witness = legal | (sub & ~cin & ~cout)
        for i in range(n):
            b = bits[i]
            if illegal & b != U0 and att[i] & sub & witness != U0:
                sup |= b
        pick = sup if sup != U0 else illegal
        one_choice = sup != U0
        for i in range(n):
            b = bits[i]
            if pick & b == U0:
                continue
            new_in = cin & ~b
            new_out = cout | b
            fix = (b | (tgt[i] & sub)) & new_out
            for j in range(n):
                bj = bits[j]
                if fix & bj != U0 and att[j] & sub & new_in == U0:
                    new_out &= ~bj
            stk_in[top] = new_in
            stk_out[top] = new_out
            top += 1
            if one_choice:
                break
    return False


def pw_chunk(att, tgt, bits, n, p_in, p_out, e, e_plus, e_minus, sem,
             lo, hi, stk_in, stk_out):
    """Sum p(G') over subgraph masks in [lo, hi) that contain ``e`` and have
    it as a σ-extension.  ``e`` must be conflict-free.  Zero-probability
    subgraphs are enumerated but never verified."""
    total = 0.0
    for s_int in range(lo, hi):
        s = np.uint64(s_int)
        if e & ~s != U0:
            continue
        prob = 1.0
        for i in range(n):
            if s & bits[i] != U0:
                prob *= p_in[i]
            else:
                prob *= p_out[i]
        if prob == 0.0:
            continue
        ok = False
        if sem == SEM_AD:
            ok = e_minus & s & ~e_plus == U0
        elif sem == SEM_ST:
            ok = s & ~e & ~e_plus == U0
        elif sem == SEM_CO:
            if e_minus & s & ~e_plus == U0:
                ok = True
                for i in range(n):
                    b = bits[i]
                    if s & b != U0 and e & b == U0 and att[i] & s & ~e_plus == U0:
                        ok = False
                        break
        elif sem == SEM_PR:
            ok = verify_preferred(att, tgt, bits, n, s, e, stk_in, stk_out)
        else:
            ok = grounded_fixpoint(att, tgt, bits, n, s) == e
        if ok:
            total += prob
    return total


def csub_chunk(att, tgt, bits, n, p_in, p_out, need_adm, lo, hi, stk_in, stk_out):
    """Scan candidate masks over the remaining-argument universe.

    A candidate qualifies when every member has an attacker inside the
    candidate and, when ``need_adm`` (preferred semantics), the induced
    subgraph has no non-empty admissible set.  Returns the probability mass
    of qualifying candidates plus instrumentation: candidates enumerated,
    their total size, qualifying count, qualifying total size.
    """
    total = 0.0
    enum_count = np.int64(0)
    enum_sizes = np.int64(0)
    qual_count = np.int64(0)
    qual_sizes = np.int64(0)
    for s_int in range(lo, hi):
        s = np.uint64(s_int)
        size = popcount(s)
        enum_count += 1
        enum_sizes += size
        ok = True
        for i in range(n):
            if s & bits[i] != U0 and att[i] & s == U0:
                ok = False
                break
        if ok and need_adm:
            ok = not nonempty_admissible(att, tgt, bits, n, s, stk_in, stk_out)
        if ok:
            qual_count += 1
            qual_sizes += size
            term = 1.0
            for i in range(n):
                if s & bits[i] != U0:
                    term *= p_in[i]
                else:
                    term *= p_out[i]
            total += term
    return total, enum_count, enum_sizes, qual_count, qual_sizes


def csub_gr_chunk(att, tgt, bits, n, e_mask, cand_pos, p_in, p_out, lo, hi):
    """Sum over subsets of the attacked-and-attacking arguments whose union
    with E keeps E as the grounded extension.  The adjacency tables cover the
    compacted universe E ∪ (E⁺ ∩ E⁻); ``cand_pos`` locates the candidate
    arguments inside it."""
    total = 0.0
    k = cand_pos.shape[0]
    count = np.int64(0)
    for s_int in range(lo, hi):
        m = e_mask
        term = 1.0
        for kk in range(k):
            if (s_int >> kk) & 1 == 1:
                m |= bits[cand_pos[kk]]
                term *= p_in[kk]
            else:
                term *= p_out[kk]
        count += 1
        if grounded_fixpoint(att, tgt, bits, n, m) == e_mask:
            total += term
    return total, count


if JIT_ENABLED:
    _jit = njit(cache=True)
    popcount = _jit(popcount)
    grounded_fixpoint = _jit(grounded_fixpoint)
    verify_preferred = _jit(verify_preferred)
    nonempty_admissible = _jit(nonempty_admissible)
    pw_chunk = _jit(pw_chunk)
    csub_chunk = _jit(csub_chunk)
    csub_gr_chunk = _jit(csub_gr_chunk)


def warmup():
    """Run every kernel once on a toy instance (triggers JIT compilation)."""
    att = np.array([2, 1], dtype=np.uint64)  # a <-> b
    tgt = np.array([2, 1], dtype=np.uint64)
    bits = np.array([1, 2], dtype=np.uint64)
    sub = np.uint64(3)
    one = np.uint64(1)
    p_in = np.array([0.5, 0.5])
    p_out = np.array([0.5, 0.5])
    si, so = scratch_stacks(2)
    popcount(sub)
    grounded_fixpoint(att, tgt, bits, 2, sub)
    verify_preferred(att, tgt, bits, 2, sub, one, si, so)
    nonempty_admissible(att, tgt, bits, 2, sub, si, so)
    for sem in (SEM_AD, SEM_CO, SEM_PR, SEM_GR, SEM_ST):
        pw_chunk(att, tgt, bits, 2, p_in, p_out, one, np.uint64(2), np.uint64(2),
                 sem, 0, 4, si, so)
    csub_chunk(att, tgt, bits, 2, p_in, p_out, True, 0, 4, si, so)
    csub_chunk(att, tgt, bits, 2, p_in, p_out, False, 0, 4, si, so)
    csub_gr_chunk(att, tgt, bits, 2, one, np.array([1], dtype=np.int64),
                  p_in[:1], p_out[:1], 0, 2)
