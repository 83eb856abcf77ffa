"""Command-line interface.

Results go to stdout as one JSON record per line, followed by the learned
concept in the concept grammar.  With ``-v`` per-stage progress records are
written to stderr.  Exit codes: 0 exact fit, 2 approximate or out of time,
3 no fit, 1 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .bisim import ALC, ALCQ, max_bisimulation, quotient
from .core.database import Database
from .core.syntax import dump_facts, dump_problem, load_facts, load_problem
from .driver import (
    APPROX,
    BUDGET,
    EXACT,
    FRAGMENTS,
    NONE,
    CompletenessWarning,
    SearchConfig,
    bounded_fit,
    max_fit,
    stage_instance,
)
from .errors import DLFitError
from .generators import gen_alcq_separation, gen_hitting_set, hitting_set_witness
from .metrics import cross_validate, evaluate
from .solve import AUTO, BUILTIN, PYSAT

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2
EXIT_NONE = 3

STATUS_EXIT = {EXACT: EXIT_OK, APPROX: EXIT_PARTIAL, BUDGET: EXIT_PARTIAL, NONE: EXIT_NONE}


class UsageError(Exception):
    pass


def _emit(record, stream=None):
    print(json.dumps(record, default=str), file=stream or sys.stdout, flush=True)


def _add_task(p):
    p.add_argument("facts", help="fact file")
    p.add_argument("problem", help='JSON file with "positive" and "negative" name lists')


def _add_search(p):
    p.add_argument("--fragment", default="alcqif", type=str.lower,
                   choices=[f.lower() for f in FRAGMENTS])
    p.add_argument("--max-stage", type=int, default=10)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--g-linear", type=float, default=1.0, metavar="C",
                   help="number bound g(k) = ceil(C*k) (default 1)")
    g.add_argument("--g-cap", type=int, default=None, metavar="N",
                   help="constant number bound; may miss fittings")
    nf = p.add_mutually_exclusive_group()
    nf.add_argument("--nf-per-stage", type=int, default=1, metavar="N",
                    help="thresholds per feature at stage k: N*k (default 1)")
    nf.add_argument("--nf-fixed", type=int, default=None, metavar="N")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--stage-timeout", type=float, default=None, metavar="S")
    p.add_argument("--timeout", type=float, default=None, metavar="S")
    p.add_argument("--solver", default=None, metavar="CMD",
                   help="external DIMACS solver command")
    p.add_argument("--backend", default=AUTO, choices=[AUTO, BUILTIN, PYSAT])
    p.add_argument("--no-quotient", action="store_true")
    p.add_argument("--approx", action="store_true",
                   help="report an approximation when no exact fit exists")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true", help="stage progress on stderr")


def _config(args) -> SearchConfig:
    return SearchConfig(
        fragment=args.fragment,
        max_stage=args.max_stage,
        g_linear=args.g_linear,
        g_cap=args.g_cap,
        nf_per_stage=args.nf_per_stage,
        nf_fixed=args.nf_fixed,
        threads=args.threads,
        stage_timeout=args.stage_timeout,
        timeout=args.timeout,
        approx=args.approx,
        quotient=not args.no_quotient,
        seed=args.seed,
        backend=args.backend,
        solver_command=args.solver,
    ).validate()


def _load_task(args):
    db = load_facts(args.facts)
    return load_problem(args.problem, db)


def _progress(args):
    if not getattr(args, "verbose", False):
        return None
    return lambda event: _emit(event, sys.stderr)


def _report(result, problem):
    record = {"record": "result", **result.to_json()}
    concept = result.concept if result.concept is not None else result.approximation
    if concept is not None:
        record["metrics"] = evaluate(concept, problem).to_json()
    _emit(record)
    text = result.concept_text()
    if text is not None:
        print(text)
    return STATUS_EXIT[result.status]


def cmd_learn(args) -> int:
    problem = _load_task(args)
    config = _config(args)
    run = max_fit if args.command == "maxfit" else bounded_fit
    if args.command == "maxfit":
        config.approx = True
    result = run(problem, config, progress=_progress(args))
    return _report(result, problem)


def cmd_crossval(args) -> int:
    problem = _load_task(args)
    config = _config(args)
    n = len(problem.positives) + len(problem.negatives)
    if n < args.folds:
        raise UsageError(f"{n} examples are too few for {args.folds} folds")

    def learner(train):
        if config.approx:
            res = max_fit(train, config)
            return res.concept
        res = bounded_fit(train, config)
        return res.concept if res.concept is not None else res.approximation

    report = cross_validate(problem, learner, args.folds, args.seed)
    _emit({"record": "crossval", **report})
    return EXIT_OK


def cmd_bisim(args) -> int:
    db = load_facts(args.facts)
    part = max_bisimulation(db, ALCQ if args.kind == "alcq" else ALC)
    _emit({
        "record": "bisim",
        "kind": part.kind,
        "n_classes": part.n_classes,
        "rounds": len(part.rounds),
        "classes": [list(m) for m in part.members()],
    })
    return EXIT_OK


def cmd_quotient(args) -> int:
    db = load_facts(args.facts)
    if db.feature_names:
        raise UsageError("quotient works on feature-free databases; remove feature facts first")
    q = quotient(db)
    text = dump_facts(q.db)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    _emit({
        "record": "quotient",
        "individuals": len(db.individuals),
        "quotient_individuals": len(q.db.individuals),
        "example_map": q.example_map,
    }, sys.stdout if args.output else sys.stderr)
    return EXIT_OK


def cmd_encode(args) -> int:
    problem = _load_task(args)
    config = _config(args)
    cnf = stage_instance(problem, config, args.k, maxfit=args.maxfit)
    dimacs = cnf.to_dimacs()
    if args.output:
        Path(args.output).write_text(dimacs, encoding="utf-8")
    else:
        sys.stdout.write(dimacs)
    if args.var_map:
        Path(args.var_map).write_text(cnf.var_map_json(), encoding="utf-8")
    meta = {"record": "encoding", "k": args.k, "vars": cnf.n_vars, "clauses": cnf.n_clauses,
            "g": config.g(args.k), "fragment": config.fragment}
    _emit(meta, sys.stdout if args.output else sys.stderr)
    return EXIT_OK


def _parse_sets(text: str) -> list:
    """'1,3;2,4' -> [{1, 3}, {2, 4}]"""
    try:
        sets = [{int(x) for x in part.split(",") if x.strip()} for part in text.split(";")]
    except ValueError:
        raise UsageError(f"bad set list {text!r}; expected e.g. '1,3;2,4'") from None
    return sets


def _write_pair(out_dir: Path, stem: str, db: Database, problem, **extra):
    out_dir.mkdir(parents=True, exist_ok=True)
    facts_path = out_dir / f"{stem}.facts"
    problem_path = out_dir / f"{stem}.json"
    facts_path.write_text(dump_facts(db), encoding="utf-8")
    problem_path.write_text(dump_problem(problem, **extra) + "\n", encoding="utf-8")
    return facts_path, problem_path


def cmd_gen_hitting_set(args) -> int:
    sets = _parse_sets(args.sets)
    if args.group_size is not None:
        print("warning: groups smaller than k'+1 void the size guarantee", file=sys.stderr)
    inst = gen_hitting_set(sets, args.k, args.group_size)
    meta = dict(inst.metadata)
    meta["witness"] = hitting_set_witness(inst) if inst.has_hitting_set else None
    facts, prob = _write_pair(Path(args.out_dir), args.name, inst.problem.database, inst.problem, metadata=meta)
    _emit({"record": "hitting_set", "facts": str(facts), "problem": str(prob), **meta})
    return EXIT_OK


def cmd_gen_alcq_sep(args) -> int:
    db = load_facts(args.facts)
    problems = gen_alcq_separation(db, seed=args.seed, merge=not args.no_merge)
    if not problems:
        _emit({"record": "alcq_separation", "problems": 0,
               "notice": "no ALC class splits into several ALCQ classes"})
        return EXIT_OK
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, sp in enumerate(problems):
        path = out_dir / f"{args.name}_{i}.json"
        path.write_text(dump_problem(sp.problem, metadata=sp.metadata) + "\n", encoding="utf-8")
        _emit({"record": "alcq_separation", "problem": str(path),
               "positives": len(sp.problem.positives), "negatives": len(sp.problem.negatives),
               **sp.metadata})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dlfit", description="Learn description-logic concepts from examples.")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, help_text in (("learn", "smallest fitting concept"),
                            ("maxfit", "concept classifying the most examples correctly")):
        p = sub.add_parser(name, help=help_text)
        _add_task(p)
        _add_search(p)
        p.set_defaults(func=cmd_learn)

    p = sub.add_parser("crossval", help="stratified k-fold cross-validation")
    _add_task(p)
    _add_search(p)
    p.add_argument("--folds", type=int, default=10)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("bisim", help="maximal bisimulation classes")
    p.add_argument("facts")
    p.add_argument("--kind", choices=["alc", "alcq"], default="alcq")
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("quotient", help="bisimulation quotient as a fact file")
    p.add_argument("facts")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("encode-dimacs", help="export the stage-k CNF")
    _add_task(p)
    _add_search(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--maxfit", action="store_true", help="include correctness indicators")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--var-map", default=None, help="write the variable meaning map as JSON")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("gen-hitting-set", help="hard instance from a hitting-set problem")
    p.add_argument("sets", help="sets over 1..n, e.g. '1,3;2,4'")
    p.add_argument("k", type=int)
    p.add_argument("--group-size", type=int, default=None)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--name", default="hitting_set")
    p.set_defaults(func=cmd_gen_hitting_set)

    p = sub.add_parser("gen-alcq-sep", help="problems that ALCQ separates but ALC does not")
    p.add_argument("facts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-merge", action="store_true")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--name", default="alcq_sep")
    p.set_defaults(func=cmd_gen_alcq_sep)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", CompletenessWarning)
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            return args.func(args)
    except (DLFitError, UsageError, OSError, ValueError) as exc:
        print(f"dlfit: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
