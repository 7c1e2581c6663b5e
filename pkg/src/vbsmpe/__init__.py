"""k most probable (Bayesian) or most plausible (Dempster-Shafer)
explanations in valuation-based systems, found by a genetic search and
checked against exact enumeration."""

from .dst import (
    CommonalityTable,
    MassUniverse,
    belief,
    combine,
    commonality,
    dst_score,
    marginalize_mass,
    plausibility,
    singleton_commonality,
    vacuous,
)
from .errors import CapacityError, ModelParseError, NoSolutionError, TotalConflictError, VbsError
from .fileio import dump_model, fixture_path, load_evidence, load_model, parse_model
from .ga import BlockedSet, GaParams, RankedExplanation, crossover, fitness, init_population, k_mpe, mutate, run_ga
from .model import BAYESIAN, DST, Evidence, Model, Variable, satisfies, validate_model
from .oracle import OracleResult, enumerate_top_k, exact_joint_commonality, joint_table
from .prob import CptUniverse, find_valuation, flat_index, prob_score

__version__ = "0.1.0"
