import json
import subprocess
import sys

import pytest

from dlfit.cli import main
from dlfit.cnf import parse_dimacs
from dlfit.core import FittingProblem, fits, load_facts, load_problem, parse_concept

from corpus import DATA

FACTS = str(DATA / "example1.facts")
TASK = str(DATA / "example1.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _records(out):
    return [json.loads(line) for line in out.splitlines() if line.startswith("{")]


def test_learn_example1(capsys):
    code, out, _ = run(capsys, "learn", FACTS, TASK, "--fragment", "alcqf")
    assert code == 0
    rec = _records(out)[0]
    assert rec["status"] == "EXACT" and rec["node_count"] == 2
    assert rec["metrics"]["accuracy"] == 1.0 and rec["metrics"]["f1"] == 1.0
    text = out.strip().splitlines()[-1]
    db = load_facts(FACTS)
    assert fits(parse_concept(text), load_problem(TASK, db)).ok


def test_learn_example1_prints_expected_concept(capsys):
    code, out, _ = run(capsys, "learn", FACTS, TASK, "--fragment", "alcqf")
    assert out.strip().splitlines()[-1] == "(atmost 1 child . (height >= 145))"


@pytest.mark.parametrize("fragment", ["alc", "alcqi"])
def test_learn_without_features_is_none(capsys, fragment):
    code, out, _ = run(capsys, "learn", FACTS, TASK, "--fragment", fragment)
    assert code == 3 and _records(out)[0]["status"] == "NONE"


def test_missing_example_name(capsys):
    code, _, err = run(capsys, "learn", FACTS, str(DATA / "example1_bad.json"))
    assert code == 1 and "zed" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "learn", str(tmp_path / "nope.facts"), TASK)
    assert code == 1 and "error" in err


def test_bad_flags(capsys):
    assert run(capsys, "learn", FACTS, TASK, "--fragment", "el")[0] == 1
    assert run(capsys, "learn", FACTS, TASK, "--g-linear", "1", "--g-cap", "2")[0] == 1
    assert run(capsys, "learn", FACTS, TASK, "--threads", "0")[0] == 1
    assert run(capsys, "--help")[0] == 0


def test_maxfit_gives_approximation(capsys):
    code, out, _ = run(capsys, "maxfit", FACTS, TASK, "--fragment", "alcqi", "--max-stage", "3")
    rec = _records(out)[0]
    assert code == 2 and rec["status"] == "APPROX" and rec["correct"] == 1


def test_verbose_progress_on_stderr(capsys):
    code, out, err = run(capsys, "learn", FACTS, TASK, "--fragment", "alcqf", "-v")
    events = [json.loads(line) for line in err.splitlines() if line.startswith("{")]
    assert [e["stage"] for e in events] == [1, 2]


def test_g_cap_warns(capsys):
    code, _, err = run(capsys, "learn", FACTS, TASK, "--fragment", "alcqf", "--g-cap", "1")
    assert "warning" in err


def test_budget_exit_code(capsys, tmp_path):
    code, _, _ = run(capsys, "gen-hitting-set", "1,3;2,4;1,2,3", "3", "--out-dir", str(tmp_path))
    facts, task = tmp_path / "hitting_set.facts", tmp_path / "hitting_set.json"
    code, out, _ = run(capsys, "learn", str(facts), str(task), "--fragment", "alcqi", "--timeout", "0.0001")
    assert code == 2 and _records(out)[0]["status"] == "BUDGET"


def test_crossval_on_graded_stars(capsys, tmp_path):
    facts = tmp_path / "stars.facts"
    lines = []
    pos, neg = [], []
    for i in range(12):
        c = f"c{i}"
        for j in range(i % 4):
            lines.append(f"r({c}, {c}_{j})")
        (pos if i % 4 >= 2 else neg).append(c)
    facts.write_text("\n".join(lines) + "\n" + "\n".join(f"B({c})" for c in pos + neg) + "\n")
    task = tmp_path / "stars.json"
    task.write_text(json.dumps({"positive": pos, "negative": neg}))
    code, out, _ = run(capsys, "crossval", str(facts), str(task), "--fragment", "alcq", "--folds", "3")
    rec = _records(out)[0]
    assert code == 0 and rec["n_folds"] == 3 and rec["f1"]["mean"] == 1.0
    assert run(capsys, "crossval", str(facts), str(task), "--folds", "50")[0] == 1


def test_bisim_two_successors(capsys, tmp_path):
    facts = tmp_path / "two.facts"
    facts.write_text("r(a,c1)\nr(a,c2)\nr(b,d1)\n")
    code, out, _ = run(capsys, "bisim", str(facts))
    rec = _records(out)[0]
    assert code == 0 and rec["n_classes"] == 3
    code, out, _ = run(capsys, "bisim", str(facts), "--kind", "alc")
    assert _records(out)[0]["n_classes"] == 2


def test_quotient_of_rigid_db(capsys, tmp_path):
    facts = tmp_path / "rigid.facts"
    facts.write_text("A(a)\nr(a,b)\nB(b)\nr(b,c)\n")
    out_path = tmp_path / "q.facts"
    code, out, _ = run(capsys, "quotient", str(facts), "-o", str(out_path))
    assert code == 0 and _records(out)[0]["quotient_individuals"] == 3
    assert len(load_facts(out_path)) == len(load_facts(facts))
    assert run(capsys, "quotient", FACTS)[0] == 1  # feature facts are refused


def test_encode_dimacs(capsys, tmp_path):
    cnf_path, map_path = tmp_path / "s2.cnf", tmp_path / "s2.json"
    code, out, _ = run(capsys, "encode-dimacs", FACTS, TASK, "--fragment", "alcqf", "--k", "2",
                       "-o", str(cnf_path), "--var-map", str(map_path))
    meta = _records(out)[0]
    text = cnf_path.read_text()
    assert text.splitlines()[0] == f"p cnf {meta['vars']} {meta['clauses']}"
    cnf = parse_dimacs(text)
    assert cnf.n_vars == meta["vars"] and cnf.n_clauses == meta["clauses"]
    assert len(json.loads(map_path.read_text())) == meta["vars"]


def test_encode_dimacs_to_stdout(capsys):
    code, out, err = run(capsys, "encode-dimacs", FACTS, TASK, "--fragment", "alcqf", "--k", "1")
    assert code == 0 and out.startswith("p cnf ") and '"record": "encoding"' in err


def test_external_solver_flag(capsys):
    solver = f"{sys.executable} -m dlfit.solve --backend builtin"
    code, out, _ = run(capsys, "learn", FACTS, TASK, "--fragment", "alcqf", "--solver", solver)
    assert code == 0 and _records(out)[0]["node_count"] == 2
    code, _, err = run(capsys, "learn", FACTS, TASK, "--fragment", "alcqf", "--solver", "/no/such/solver")
    assert code == 1 and "not found" in err


def test_gen_hitting_set_single_set(capsys, tmp_path):
    code, out, _ = run(capsys, "gen-hitting-set", "1", "1", "--out-dir", str(tmp_path), "--name", "one")
    rec = _records(out)[0]
    assert code == 0 and rec["k_prime"] == 4 and rec["has_hitting_set"]
    assert rec["witness"] == "(exists r . (exists s . (exists s . A)))"
    db = load_facts(tmp_path / "one.facts")
    problem = load_problem(tmp_path / "one.json", db)
    assert fits(parse_concept(rec["witness"]), problem).ok


def test_gen_hitting_set_errors(capsys, tmp_path):
    assert run(capsys, "gen-hitting-set", "1,3", "1", "--out-dir", str(tmp_path))[0] == 1
    assert run(capsys, "gen-hitting-set", "1,x", "1", "--out-dir", str(tmp_path))[0] == 1
    code, _, err = run(capsys, "gen-hitting-set", "1;2", "1", "--group-size", "2", "--out-dir", str(tmp_path))
    assert code == 0 and "warning" in err


def test_gen_alcq_sep(capsys, tmp_path):
    facts = tmp_path / "two.facts"
    facts.write_text("r(a,c1)\nr(a,c2)\nr(b,d1)\n")
    code, out, _ = run(capsys, "gen-alcq-sep", str(facts), "--out-dir", str(tmp_path))
    recs = _records(out)
    assert code == 0 and len(recs) == 1
    db = load_facts(facts)
    problem = load_problem(recs[0]["problem"], db)
    assert {problem.positives, problem.negatives} == {("a",), ("b",)}
    rigid = tmp_path / "rigid.facts"
    rigid.write_text("r(a,b)\nr(b,c)\n")
    code, out, _ = run(capsys, "gen-alcq-sep", str(rigid), "--out-dir", str(tmp_path))
    assert code == 0 and _records(out)[0]["problems"] == 0


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dlfit.cli", "learn", FACTS, TASK, "--fragment", "alcqf"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip().splitlines()[-1] == "(atmost 1 child . (height >= 145))"
