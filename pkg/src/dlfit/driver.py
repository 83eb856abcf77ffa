"""Bounded fitting: try concept sizes k = 1, 2, ... until a SAT stage.

Each stage booleanizes features with the stage's threshold count, optionally
shrinks the database to its bisimulation quotient, encodes "some concept
with at most k nodes fits", and decodes the first model.  The decoded
concept is translated back to the user's signature and re-checked on the
original database.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

from .bisim import ALC, ALCQ, max_bisimulation, quotient
from .core.concept import Concept, node_count
from .core.database import FittingProblem
from .core.semantics import FitCheck, fits
from .core.syntax import render_concept
from .encode import decode, decode_tree, encode, require_correct, shape_clauses, shape_edges
from .errors import ConceptTooLarge, ConfigError, InternalConsistencyError
from .polyfit import approx_select, construct_fitting, fitting_exists
from .reduce import (
    ReductionContext,
    add_inverse_roles,
    booleanize_features,
    restore_features,
    restore_inverse_roles,
    select_thresholds,
)
from .solve import AUTO, SAT, TIMEOUT, UNSAT, CancelToken, SolveResult, solve

FRAGMENTS = ("ALC", "ALCI", "ALCQ", "ALCQf", "ALCQI", "ALCQIf")

EXACT = "EXACT"
APPROX = "APPROX"
NONE = "NONE"
BUDGET = "BUDGET"


class CompletenessWarning(UserWarning):
    """The configured number bound can miss fitting concepts."""


def normalize_fragment(name: str) -> str:
    for f in FRAGMENTS:
        if f.lower() == str(name).lower():
            return f
    raise ConfigError(f"unknown fragment {name!r}; choose from {', '.join(FRAGMENTS)}")


@dataclass
class SearchConfig:
    fragment: str = "ALCQIf"
    max_stage: int = 10
    # g(k) = ceil(g_linear * k), or the constant g_cap when set
    g_linear: float = 1.0
    g_cap: int | None = None
    # n_f(k) = nf_per_stage * k, or the constant nf_fixed when set
    nf_per_stage: int = 1
    nf_fixed: int | None = None
    threads: int = 1
    stage_timeout: float | None = None
    timeout: float | None = None
    approx: bool = False
    quotient: bool = True
    seed: int = 0
    backend: str = AUTO
    solver_command: str | None = None
    merge_bisimilar: bool = True
    snap: str = "up"

    def validate(self) -> "SearchConfig":
        self.fragment = normalize_fragment(self.fragment)
        if self.max_stage < 1:
            raise ConfigError("max_stage must be at least 1")
        if self.g_cap is not None:
            if self.g_cap < 0:
                raise ConfigError("g_cap must be non-negative")
            if self.counting:
                warnings.warn(
                    f"constant number bound {self.g_cap} is not linear in k; "
                    "fittings needing larger numbers are missed",
                    CompletenessWarning,
                    stacklevel=2,
                )
        elif not self.g_linear > 0:
            raise ConfigError("g_linear must be positive so that g grows linearly in k")
        if self.nf_fixed is not None and self.nf_fixed < 1:
            raise ConfigError("nf_fixed must be at least 1")
        if self.nf_per_stage < 1:
            raise ConfigError("nf_per_stage must be at least 1")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        for name in ("stage_timeout", "timeout"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigError(f"{name} must be positive")
        return self

    @property
    def counting(self) -> bool:
        return "Q" in self.fragment

    @property
    def inverse(self) -> bool:
        return "I" in self.fragment

    @property
    def features(self) -> bool:
        return self.fragment.endswith("f")

    def g(self, k: int) -> int:
        if self.g_cap is not None:
            return self.g_cap
        return max(1, math.ceil(self.g_linear * k))

    def n_f(self, k: int) -> int:
        return self.nf_fixed if self.nf_fixed is not None else self.nf_per_stage * k


@dataclass
class FitResult:
    status: str
    concept: Concept | None = None
    stage: int | None = None
    node_count: int | None = None
    fit: FitCheck | None = None
    stages: list = field(default_factory=list)
    reason: str = ""
    approximation: Concept | None = None
    correct: int | None = None
    total: int = 0
    elapsed: float = 0.0

    @property
    def vector(self):
        return self.fit.vector if self.fit is not None else None

    def concept_text(self, limit: int = 100_000) -> str | None:
        c = self.concept if self.concept is not None else self.approximation
        if c is None:
            return None
        try:
            return render_concept(c, limit)
        except ConceptTooLarge:
            return None

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "concept": self.concept_text() if self.concept is not None else None,
            "stage": self.stage,
            "node_count": self.node_count,
            "correct": self.correct,
            "total": self.total,
            "reason": self.reason,
            "elapsed": round(self.elapsed, 4),
            "stages": self.stages,
        }
        if self.fit is not None:
            out["fit_positive"] = list(self.fit.positives)
            out["fit_negative"] = list(self.fit.negatives)
        if self.approximation is not None:
            out["approximation"] = self.concept_text()
            out["approximation_node_count"] = node_count(self.approximation)
        return out


@dataclass(frozen=True)
class Topology:
    arities: tuple
    edges: tuple

    @property
    def size(self) -> int:
        return len(self.arities)


def enumerate_topologies(k: int, maximal_only: bool = False) -> list[Topology]:
    """Ordered tree shapes (leaf / unary / binary) with at most k nodes.

    Shapes are arity sequences in breadth-first order; the wiring is fixed
    by that order, matching the encoder's node numbering.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    out = []

    def grow(prefix, open_slots):
        m = len(prefix)
        if open_slots == 0:
            if not maximal_only or m == k:
                out.append(Topology(tuple(prefix), tuple(shape_edges(prefix))))
            return
        if m + open_slots > k:
            return
        for a in (0, 1, 2):
            prefix.append(a)
            grow(prefix, open_slots - 1 + a)
            prefix.pop()

    grow([], 1)
    out.sort(key=lambda t: (t.size, t.arities))
    return out


def parallel_stage(
    cnf,
    topologies,
    threads: int,
    budget: float | None = None,
    backend: str = AUTO,
    command: str | None = None,
    cancel: CancelToken | None = None,
) -> SolveResult:
    """Solve ``cnf`` split by tree shape over ``threads`` workers.

    Shapes are dealt round-robin into buckets; each worker solves the CNF
    plus "the tree has one of my shapes".  The first SAT answer cancels the
    other workers.
    """
    if threads <= 1 or len(topologies) <= 1:
        return solve(cnf, budget, backend, cancel, command)
    buckets = [topologies[i::threads] for i in range(threads)]
    buckets = [b for b in buckets if b]
    token = CancelToken()
    if cancel is not None:
        cancel.register(token.cancel)

    def work(bucket):
        sub = cnf.copy()
        selectors = []
        for shape in bucket:
            s = sub.fresh("shape")
            sub.extend(shape_clauses(sub, shape.arities, s))
            selectors.append(s)
        sub.add(selectors)
        return solve(sub, budget, backend, token, command)

    winner = None
    statuses = []
    try:
        with ThreadPoolExecutor(max_workers=len(buckets)) as pool:
            futures = [pool.submit(work, b) for b in buckets]
            for fut in as_completed(futures):
                res = fut.result()
                statuses.append(res.status)
                if res.status == SAT and winner is None:
                    winner = res
                    winner.stats["bucket"] = futures.index(fut)
                    token.cancel()
    finally:
        if cancel is not None:
            cancel.unregister(token.cancel)
    if winner is not None:
        winner.stats["workers"] = len(buckets)
        return winner
    if all(s == UNSAT for s in statuses):
        return SolveResult(UNSAT, None, {"workers": len(buckets)})
    return SolveResult(TIMEOUT, None, {"workers": len(buckets)})


@dataclass
class _Prepared:
    """A booleanized (and possibly quotiented) database for one threshold set."""

    db: object
    ctx: ReductionContext
    positives: list
    negatives: list
    separable: bool
    thresholds: dict


class _Pipeline:
    def __init__(self, problem: FittingProblem, config: SearchConfig):
        self.problem = problem
        self.config = config
        db = problem.database
        self.inv_ctx = ReductionContext()
        if config.inverse:
            db, self.inv_ctx = add_inverse_roles(db)
        self.db_inv = db
        self.kind = ALCQ if config.counting else ALC
        self.cache: dict = {}

    def thresholds(self, n_f: int | None) -> dict:
        if not self.config.features:
            return {}
        db = self.db_inv
        if n_f is None:
            return {f: db.observed_values(f) for f in db.feature_names}
        return {f: select_thresholds(db, f, n_f, self.config.snap) for f in db.feature_names}

    def prepare(self, n_f: int | None) -> _Prepared:
        th = self.thresholds(n_f)
        key = tuple((f, tuple(vs)) for f, vs in sorted(th.items()))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        db, ctx = booleanize_features(self.db_inv, th)
        sub = self.problem.with_database(db)
        separable = fitting_exists(sub, self.kind)
        pos, neg = list(self.problem.positives), list(self.problem.negatives)
        if self.config.quotient:
            q = quotient(db)
            db = q.db
            pos = [q.example_map[a] for a in pos]
            neg = [q.example_map[b] for b in neg]
        prep = _Prepared(db, ctx, pos, neg, separable, th)
        self.cache[key] = prep
        return prep

    def back_translate(self, concept: Concept, ctx: ReductionContext) -> Concept:
        # keep "not (f >= v)" as two nodes so the size matches the stage
        c = restore_features(concept, ctx, simplify=False)
        return restore_inverse_roles(c, self.inv_ctx)


def stage_instance(problem: FittingProblem, config: SearchConfig, k: int, maxfit: bool = False):
    """The CNF that bounded_fit solves at stage k (for export and inspection)."""
    config.validate()
    prep = _Pipeline(problem, config).prepare(config.n_f(k))
    cnf = encode(
        prep.db,
        prep.positives,
        prep.negatives,
        k,
        config.g(k),
        config.fragment,
        merge_bisimilar=config.merge_bisimilar,
        maxfit=maxfit,
    )
    return cnf


def _remaining(deadline):
    return None if deadline is None else deadline - time.monotonic()


def _stage_budget(config: SearchConfig, deadline):
    rem = _remaining(deadline)
    if config.stage_timeout is None:
        return rem
    return config.stage_timeout if rem is None else min(rem, config.stage_timeout)


def _run(cnf, k, config, budget, cancel):
    if config.threads > 1:
        return parallel_stage(
            cnf,
            enumerate_topologies(k),
            config.threads,
            budget,
            config.backend,
            config.solver_command,
            cancel,
        )
    return solve(cnf, budget, config.backend, cancel, config.solver_command)


def _emit(progress, event):
    if progress is not None:
        progress(event)


def _approximation(pipe: _Pipeline) -> Concept | None:
    """Polynomial-time approximation on the fully booleanized database."""
    if not pipe.config.counting:
        return None
    prep_db, ctx = booleanize_features(pipe.db_inv, pipe.thresholds(None))
    sub = pipe.problem.with_database(prep_db)
    part = max_bisimulation(prep_db, ALCQ)
    concept = construct_fitting(approx_select(sub, part), part)
    return restore_inverse_roles(restore_features(concept, ctx, simplify=False), pipe.inv_ctx)


def bounded_fit(
    problem: FittingProblem,
    config: SearchConfig | None = None,
    progress=None,
    cancel: CancelToken | None = None,
) -> FitResult:
    """Smallest concept (by node count) that fits, found stage by stage."""
    config = (config or SearchConfig()).validate()
    start = time.monotonic()
    deadline = None if config.timeout is None else start + config.timeout
    pipe = _Pipeline(problem, config)
    total = len(problem.positives) + len(problem.negatives)
    stages = []

    def finish(status, **kw):
        res = FitResult(status, stages=stages, total=total, **kw)
        res.elapsed = time.monotonic() - start
        return res

    full = pipe.prepare(None)
    if not full.separable:
        approx = _approximation(pipe) if config.approx else None
        return finish(
            NONE,
            reason=f"some positive example is {pipe.kind}-bisimilar to a negative one",
            approximation=approx,
        )

    for k in range(1, config.max_stage + 1):
        if cancel is not None and cancel.is_set():
            return finish(BUDGET, reason="search cancelled", stage=k)
        budget = _stage_budget(config, deadline)
        if budget is not None and budget <= 0:
            return finish(BUDGET, reason="time budget exhausted", stage=k)
        prep = pipe.prepare(config.n_f(k))
        rec = {"stage": k, "g": config.g(k), "thresholds": {f: len(v) for f, v in prep.thresholds.items()}}
        if not prep.separable:
            rec["status"] = UNSAT
            rec["note"] = "thresholds of this stage cannot separate the examples"
            stages.append(rec)
            _emit(progress, {"event": "stage", **rec})
            continue
        t0 = time.monotonic()
        cnf = encode(
            prep.db,
            prep.positives,
            prep.negatives,
            k,
            config.g(k),
            config.fragment,
            merge_bisimilar=config.merge_bisimilar,
        )
        t1 = time.monotonic()
        res = _run(cnf, k, config, budget, cancel)
        t2 = time.monotonic()
        rec.update(
            status=res.status,
            vars=cnf.n_vars,
            clauses=cnf.n_clauses,
            encode_time=round(t1 - t0, 4),
            solve_time=round(t2 - t1, 4),
        )
        stages.append(rec)
        _emit(progress, {"event": "stage", **rec})
        if res.status == TIMEOUT:
            return finish(BUDGET, reason="time budget exhausted", stage=k)
        if res.status == UNSAT:
            continue
        decode(res.model, cnf)
        tree = decode_tree(res.model, cnf)
        concept = pipe.back_translate(tree["concept"], prep.ctx)
        check = fits(concept, problem)
        if not check.ok:
            raise InternalConsistencyError("back-translated concept does not fit the original examples")
        rec["pruned_size"] = tree["size"]
        return finish(
            EXACT,
            concept=concept,
            stage=k,
            node_count=node_count(concept),
            fit=check,
            correct=check.n_correct,
        )
    return finish(NONE, reason=f"no fitting concept with at most {config.max_stage} nodes")


def _upper_bound(pipe: _Pipeline) -> int:
    """Most examples any concept can classify correctly (per-class majority)."""
    sub_db, _ = booleanize_features(pipe.db_inv, pipe.thresholds(None))
    part = max_bisimulation(sub_db, pipe.kind)
    pos, neg = {}, {}
    for a in pipe.problem.positives:
        x = part.class_of(a)
        pos[x] = pos.get(x, 0) + 1
    for b in pipe.problem.negatives:
        x = part.class_of(b)
        neg[x] = neg.get(x, 0) + 1
    return sum(max(pos.get(x, 0), neg.get(x, 0)) for x in set(pos) | set(neg))


def max_fit(
    problem: FittingProblem,
    config: SearchConfig | None = None,
    progress=None,
    cancel: CancelToken | None = None,
) -> FitResult:
    """Concept classifying as many examples as possible, smallest first.

    At every stage the number t of correctly classified examples is pushed
    down from the best possible value until a stage-k concept achieves it;
    the search stops once no concept of any size can do better.
    """
    config = (config or SearchConfig()).validate()
    start = time.monotonic()
    deadline = None if config.timeout is None else start + config.timeout
    pipe = _Pipeline(problem, config)
    total = len(problem.positives) + len(problem.negatives)
    bound = _upper_bound(pipe)
    stages = []
    best = None  # (t, concept, stage, check)

    def finish(status, reason=""):
        kw = {}
        if best is not None:
            t, concept, k, check = best
            kw = dict(concept=concept, stage=k, node_count=node_count(concept), fit=check, correct=t)
        res = FitResult(status, stages=stages, total=total, reason=reason, **kw)
        res.elapsed = time.monotonic() - start
        return res

    def status_of_best():
        if best is None:
            return NONE
        return EXACT if best[0] == total else APPROX

    for k in range(1, config.max_stage + 1):
        if cancel is not None and cancel.is_set():
            return finish(BUDGET, "search cancelled")
        prep = pipe.prepare(config.n_f(k))
        t0 = time.monotonic()
        cnf = encode(
            prep.db,
            prep.positives,
            prep.negatives,
            k,
            config.g(k),
            config.fragment,
            merge_bisimilar=config.merge_bisimilar,
            maxfit=True,
        )
        rec = {"stage": k, "g": config.g(k), "vars": cnf.n_vars, "clauses": cnf.n_clauses,
               "encode_time": round(time.monotonic() - t0, 4), "tried": []}
        stages.append(rec)
        floor = best[0] if best is not None else -1
        for t in range(bound, floor, -1):
            budget = _stage_budget(config, deadline)
            if budget is not None and budget <= 0:
                _emit(progress, {"event": "stage", **rec})
                return finish(BUDGET, "time budget exhausted")
            extra = require_correct(cnf, t)
            res = _run(cnf.with_clauses(extra), k, config, budget, cancel)
            rec["tried"].append([t, res.status])
            if res.status == TIMEOUT:
                _emit(progress, {"event": "stage", **rec})
                return finish(BUDGET, "time budget exhausted")
            if res.status == SAT:
                tree = decode_tree(res.model, cnf)
                decode(res.model, cnf)
                concept = pipe.back_translate(tree["concept"], prep.ctx)
                check = fits(concept, problem)
                if check.n_correct < t:
                    raise InternalConsistencyError("max-fit concept classifies fewer examples than claimed")
                best = (check.n_correct, concept, k, check)
                break
        _emit(progress, {"event": "stage", **rec, "best": None if best is None else best[0]})
        if best is not None and best[0] >= bound:
            break
    return finish(status_of_best(), "" if best is None or best[0] == total else
                  f"best concept classifies {best[0]} of {total} examples")


__all__ = [
    "APPROX",
    "BUDGET",
    "EXACT",
    "FRAGMENTS",
    "NONE",
    "CompletenessWarning",
    "FitResult",
    "SearchConfig",
    "Topology",
    "bounded_fit",
    "enumerate_topologies",
    "max_fit",
    "parallel_stage",
]
