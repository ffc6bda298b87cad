"""Probabilistic response-time analysis for DAG tasks with probabilistic branches."""

from importlib import resources

from .lambdastar import LambdaStarSet, PairClass, classify_pair, compute_lambda_star
from .lowerbound import SubStructure, build_substructure, delta
from .model import (
    Branch,
    InvalidPDagError,
    Node,
    PDag,
    PDagFormatError,
    ProbStructure,
    ValidationReport,
    make_pdag,
    parse_pdag,
    prepare,
    scenario_count,
    serialize_pdag,
    validate,
)
from .probability import ProbabilityAssignment, assign_probabilities, co_longest_bound, exec_probability
from .response import RtDistribution, build_distribution, interference, meet_probability, response_bound

__version__ = "0.1.0"


def load_fixture(name):
    """Shipped example instances: ``"ex_a"`` or ``"ex_b"``."""
    text = resources.files(__package__).joinpath("fixtures", f"{name}.json").read_text()
    return parse_pdag(text)


def analyze(pdag, m):
    """Full pipeline: longest-path set, probabilities and the response-time distribution."""
    pdag = prepare(pdag)
    lam = compute_lambda_star(pdag)
    probs = assign_probabilities(lam, pdag)
    return lam, probs, build_distribution(lam, probs, pdag, m)
