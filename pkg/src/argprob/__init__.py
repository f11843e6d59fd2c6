"""Extension probabilities for probabilistic argument graphs.

Two exact engines compute the probability that a set of arguments is an
extension under admissible, complete, preferred, grounded or stable
semantics: `pw_probability` enumerates every possible world, while
`csub_probability` exploits the characterization of the qualifying
subgraphs to enumerate at most the remaining-argument subsets.  A benchmark
harness compares the two.
"""

from ._kernels import backend
from .bench import (BenchConfig, BenchRecord, CellSummary, random_prag,
                    random_conflict_free_set, run_benchmark, summarize,
                    write_csv)
from .cli import GraphDocument, parse_graph, serialize_graph
from .csub import (CsubStats, csub_probability, p_admissible, p_complete,
                   p_grounded, p_preferred, p_stable, rho)
from .errors import (ConflictFreeSampleError, DeadlineExceeded,
                     GraphParseError, GraphSizeError, NotConflictFreeError,
                     UnknownArgumentError)
from .graph import ArgumentGraph, Decomposition, PrAG
from .pw import pw_probability, subgraph_probability
from .semantics import (SEMANTICS, Label, Labelling, Legality,
                        enumerate_extensions, grounded_extension,
                        has_nonempty_admissible, is_extension,
                        label_legality, super_illegally_in, transition_step,
                        verify_preferred_labelling)

__version__ = "0.1.0"

__all__ = [
    "ArgumentGraph", "BenchConfig", "BenchRecord", "CellSummary",
    "ConflictFreeSampleError", "CsubStats", "DeadlineExceeded",
    "Decomposition", "GraphDocument", "GraphParseError", "GraphSizeError",
    "Label", "Labelling", "Legality", "NotConflictFreeError", "PrAG",
    "SEMANTICS", "UnknownArgumentError", "backend", "csub_probability",
    "enumerate_extensions", "grounded_extension", "has_nonempty_admissible",
    "is_extension", "label_legality", "p_admissible", "p_complete",
    "p_grounded", "p_preferred", "p_stable", "parse_graph", "pw_probability",
    "random_conflict_free_set", "random_prag", "rho", "run_benchmark",
    "serialize_graph", "subgraph_probability", "summarize",
    "super_illegally_in", "transition_step", "verify_preferred_labelling",
    "write_csv",
]
