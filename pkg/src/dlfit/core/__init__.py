from .concept import (
    Concept,
    Role,
    at_least,
    at_most,
    atom,
    bot,
    check_tree_size,
    conj,
    conj_all,
    dag_nodes,
    disj,
    disj_all,
    exists,
    feature_geq,
    feature_leq,
    forall,
    neg,
    node_count,
    string_size,
    top,
    transform,
)
from .database import (
    ConceptFact,
    Database,
    FeatureFact,
    FittingProblem,
    RoleFact,
    Signature,
)
from .semantics import FitCheck, eval_concept, eval_mask, fits
from .syntax import (
    dump_facts,
    dump_problem,
    load_facts,
    load_problem,
    parse_concept,
    parse_facts,
    problem_from_dict,
    render_concept,
)

__all__ = [
    "Concept",
    "ConceptFact",
    "Database",
    "FeatureFact",
    "FitCheck",
    "FittingProblem",
    "Role",
    "RoleFact",
    "Signature",
    "at_least",
    "at_most",
    "atom",
    "bot",
    "check_tree_size",
    "conj",
    "conj_all",
    "dag_nodes",
    "disj",
    "disj_all",
    "dump_facts",
    "dump_problem",
    "eval_concept",
    "eval_mask",
    "exists",
    "feature_geq",
    "feature_leq",
    "fits",
    "forall",
    "load_facts",
    "load_problem",
    "neg",
    "node_count",
    "parse_concept",
    "parse_facts",
    "problem_from_dict",
    "render_concept",
    "string_size",
    "top",
    "transform",
]
