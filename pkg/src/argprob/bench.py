"""Random-instance generator and timing harness.

Reproduces the comparison protocol between the possible-worlds and the
characterized-subgraph engines: random graphs at fixed node counts and
edge/node ratios, random conflict-free query sets of fixed size, repeated
trials with a hard timeout.  Both methods see identical instances within a
trial; per-trial seeds are derived from the master seed by a stable hash so
cells are independently reproducible.

Timeouts follow the averaging convention of the protocol: a timed-out trial
is recorded with the timeout as its elapsed time and no probability.
"""

from __future__ import annotations

import csv
import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _kernels as _k
from .csub import csub_probability
from .errors import ConflictFreeSampleError, DeadlineExceeded
from .graph import ArgumentGraph, PrAG
from .pw import pw_probability
from .semantics import check_semantics

METHODS = ("pw", "csub")

#: give up on a query-set size after this many rejected uniform samples
SAMPLE_CAP = 10_000
#: regenerate the graph at most this often before propagating the failure
REGENERATION_CAP = 100

CSV_FIELDS = ("nodes", "ratio", "ext_size", "trial", "seed", "method",
              "time_ms", "timed_out", "probability", "max_bprime",
              "avg_bprime_qualifying", "avg_bprime_enumerated")


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary key parts (insertion-order safe:
    adding cells to a config never shifts other cells' instances)."""
    text = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little")


def format_ratio(ratio: Fraction) -> str:
    return f"{ratio.numerator}:{ratio.denominator}"


def parse_ratio(text: str) -> Fraction:
    """Parse "2:1"-style edge/node ratios (a bare number means n:1)."""
    text = text.strip()
    if ":" in text:
        num, den = text.split(":", 1)
        ratio = Fraction(int(num), int(den))
    else:
        ratio = Fraction(int(text))
    if ratio <= 0:
        raise ValueError(f"edge ratio must be positive, got {text!r}")
    return ratio


def random_prag(n: int, m: int, rng_seed: int) -> PrAG:
    """A random graph on arguments a0..a(n-1) with ``m`` distinct directed
    edges drawn uniformly from all n² ordered pairs (self-loops allowed) and
    probabilities uniform on (0, 1), rounded to 3 decimals, never zero."""
    if n < 1:
        raise ValueError(f"need at least one argument, got n={n}")
    if not 0 <= m <= n * n:
        raise ValueError(f"cannot place {m} distinct edges on {n} arguments")
    rng = np.random.default_rng(np.uint64(rng_seed))
    names = [f"a{i}" for i in range(n)]
    probs = {}
    for name in names:
        p = round(float(rng.uniform()), 3)
        while p == 0.0:
            p = round(float(rng.uniform()), 3)
        probs[name] = p
    # partial Fisher-Yates over pair codes, sparse so n can be large
    total = n * n
    swapped: dict[int, int] = {}
    attacks = []
    for k in range(m):
        j = k + int(rng.integers(total - k))
        pick = swapped.get(j, j)
        swapped[j] = swapped.get(k, k)
        attacks.append((names[pick // n], names[pick % n]))
    return PrAG(ArgumentGraph(names, attacks), probs)


def random_conflict_free_set(g: ArgumentGraph, j: int, rng_seed: int) -> frozenset[str]:
    """A uniformly sampled conflict-free subset of size ``j`` (rejection
    sampling over uniform j-subsets); raises `ConflictFreeSampleError` after
    ``SAMPLE_CAP`` rejected samples."""
    if j < 0:
        raise ValueError(f"set size must be non-negative, got {j}")
    if j == 0:
        return frozenset()
    if j > g.n:
        raise ConflictFreeSampleError(
            f"no {j}-subset exists in a graph with {g.n} arguments")
    rng = np.random.default_rng(np.uint64(rng_seed))
    for _ in range(SAMPLE_CAP):
        members = [g.names[i] for i in rng.choice(g.n, size=j, replace=False)]
        if g.is_conflict_free(members):
            return frozenset(members)
    raise ConflictFreeSampleError(
        f"no conflict-free set of size {j} found in {SAMPLE_CAP} samples")


@dataclass(frozen=True)
class BenchConfig:
    node_counts: tuple[int, ...]
    edge_ratios: tuple[Fraction, ...]
    ext_sizes: tuple[int, ...]
    trials_per_cell: int = 20
    timeout_s: float = 180.0
    seed: int = 0
    methods: tuple[str, ...] = METHODS
    semantics: str = "pr"
    #: worker count; keep 1 so timing trials never share the machine
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "node_counts", tuple(self.node_counts))
        object.__setattr__(self, "edge_ratios",
                           tuple(Fraction(r) for r in self.edge_ratios))
        object.__setattr__(self, "ext_sizes", tuple(self.ext_sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.node_counts or min(self.node_counts) < 1:
            raise ValueError("node_counts must be positive")
        if not self.edge_ratios or min(self.edge_ratios) <= 0:
            raise ValueError("edge_ratios must be positive")
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be at least 1")
        if self.timeout_s <= 0:
            raise ValueError("timeout must be positive")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ValueError(f"methods must be a non-empty subset of {METHODS}")
        check_semantics(self.semantics)
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        for size in self.ext_sizes:
            if any(size > n for n in self.node_counts):
                raise ValueError(
                    f"extension size {size} exceeds a configured node count")


@dataclass(frozen=True)
class BenchRecord:
    nodes: int
    ratio: Fraction
    ext_size: int
    trial_index: int
    trial_seed: int
    method: str
    elapsed_s: float
    timed_out: bool
    probability: Optional[float]
    max_bprime: Optional[int]
    avg_bprime_qualifying: Optional[float]
    avg_bprime_enumerated: Optional[float]


@dataclass(frozen=True)
class CellSummary:
    nodes: int
    ratio: Fraction
    ext_size: int
    method: str
    trials: int
    timeouts: int
    mean_secs: float
    mean_max_bprime: Optional[float]


def _make_instance(cfg: BenchConfig, nodes: int, ratio: Fraction,
                   ext_size: int, trial_index: int):
    trial_seed = derive_seed(cfg.seed, nodes, ratio.numerator,
                             ratio.denominator, ext_size, trial_index)
    m = int(round(ratio * nodes))
    for attempt in range(REGENERATION_CAP):
        pg = random_prag(nodes, m, derive_seed(trial_seed, "graph", attempt))
        try:
            members = random_conflict_free_set(
                pg.graph, ext_size, derive_seed(trial_seed, "set", attempt))
        except ConflictFreeSampleError:
            if attempt == REGENERATION_CAP - 1:
                raise
            continue
        return trial_seed, pg, members
    raise AssertionError("unreachable")


def _run_method(pg: PrAG, members, method: str, semantics: str,
                timeout_s: float):
    instrumented = method == "csub" and semantics in ("co", "pr", "gr")
    stats = None
    start = time.perf_counter()
    try:
        if method == "pw":
            prob = pw_probability(pg, members, semantics, timeout_s=timeout_s)
        elif instrumented:
            prob, stats = csub_probability(pg, members, semantics,
                                           timeout_s=timeout_s, instrument=True)
        else:
            prob = csub_probability(pg, members, semantics, timeout_s=timeout_s)
        elapsed = time.perf_counter() - start
        return elapsed, False, prob, stats
    except DeadlineExceeded as exc:
        # averaging convention: a timeout counts at the timeout value
        return timeout_s, True, None, exc.stats


def _trial_records(cfg: BenchConfig, nodes: int, ratio: Fraction,
                   ext_size: int, trial_index: int) -> list[BenchRecord]:
    trial_seed, pg, members = _make_instance(cfg, nodes, ratio, ext_size,
                                             trial_index)
    records = []
    for method in cfg.methods:
        elapsed, timed_out, prob, stats = _run_method(
            pg, members, method, cfg.semantics, cfg.timeout_s)
        records.append(BenchRecord(
            nodes=nodes, ratio=ratio, ext_size=ext_size,
            trial_index=trial_index, trial_seed=trial_seed, method=method,
            elapsed_s=elapsed, timed_out=timed_out, probability=prob,
            max_bprime=None if stats is None else stats.max_bprime,
            avg_bprime_qualifying=None if stats is None
            else stats.avg_bprime_qualifying,
            avg_bprime_enumerated=None if stats is None
            else stats.avg_bprime_enumerated,
        ))
    return records


def _record_key(r: BenchRecord):
    return (r.nodes, r.ratio, r.ext_size, r.trial_index, r.method)


def run_benchmark(cfg: BenchConfig) -> list[BenchRecord]:
    """One record per (cell, trial, method), canonically sorted."""
    _k.warmup()  # compilation must never leak into the first timed trial
    tasks = [(nodes, ratio, ext_size, trial)
             for nodes in cfg.node_counts
             for ratio in cfg.edge_ratios
             for ext_size in cfg.ext_sizes
             for trial in range(cfg.trials_per_cell)]
    records: list[BenchRecord] = []
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            for batch in pool.map(_trial_worker,
                                  [(cfg, *task) for task in tasks]):
                records.extend(batch)
    else:
        for task in tasks:
            records.extend(_trial_records(cfg, *task))
    records.sort(key=_record_key)
    return records


def _trial_worker(packed):
    cfg, nodes, ratio, ext_size, trial = packed
    return _trial_records(cfg, nodes, ratio, ext_size, trial)


def summarize(records: Sequence[BenchRecord]) -> list[CellSummary]:
    """Per-cell means; timed-out trials enter the mean at the timeout value."""
    groups: dict[tuple, list[BenchRecord]] = {}
    for r in sorted(records, key=_record_key):
        groups.setdefault((r.nodes, r.ratio, r.ext_size, r.method), []).append(r)
    out = []
    for (nodes, ratio, ext_size, method), rows in groups.items():
        bprimes = [r.max_bprime for r in rows if r.max_bprime is not None]
        out.append(CellSummary(
            nodes=nodes, ratio=ratio, ext_size=ext_size, method=method,
            trials=len(rows),
            timeouts=sum(r.timed_out for r in rows),
            mean_secs=sum(r.elapsed_s for r in rows) / len(rows),
            mean_max_bprime=(sum(bprimes) / len(bprimes)) if bprimes else None,
        ))
    return out


def write_csv(records: Sequence[BenchRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for r in records:
            writer.writerow([
                r.nodes,
                format_ratio(r.ratio),
                r.ext_size,
                r.trial_index,
                r.trial_seed,
                r.method,
                f"{r.elapsed_s * 1000.0:.3f}",
                int(r.timed_out),
                "" if r.probability is None else repr(r.probability),
                "" if r.max_bprime is None else r.max_bprime,
                "" if r.avg_bprime_qualifying is None
                else repr(r.avg_bprime_qualifying),
                "" if r.avg_bprime_enumerated is None
                else repr(r.avg_bprime_enumerated),
            ])
