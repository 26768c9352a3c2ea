"""Pre-synthesis of quantum circuits: merge plans that lower the T-count of local synthesis."""
from .circuit import Circuit, Gate, compute_unitary, distance, interacting_pairs, t_count, u1q, u2q
from .merge import apply_plan, one_qubit_merge, two_qubit_merge
from .qasm import emit_qasm, parse_qasm
from .search.brute import brute_force_search
from .search.env import MergeEnv
from .search.greedy import greedy_refine, greedy_search
from .search.learners import policy_search
from .synth.backend import SynthBackend, make_backend
from .synthesize import merge_and_synthesize, synthesize_detail

__version__ = "0.1.0"

__all__ = [
    "Circuit", "Gate", "compute_unitary", "distance", "interacting_pairs", "t_count", "u1q", "u2q",
    "apply_plan", "one_qubit_merge", "two_qubit_merge", "emit_qasm", "parse_qasm",
    "brute_force_search", "MergeEnv", "greedy_refine", "greedy_search", "policy_search",
    "SynthBackend", "make_backend", "merge_and_synthesize", "synthesize_detail",
]
