import json

import pytest

from multimatch.cli import bench_rows, main
from multimatch.core import parse_instance, serialize_instance, serialize_solution
from multimatch.exact import MIM, exact_solve
from multimatch.gadgets import gen_counterexample, gen_lp_gap, gen_two_cycles


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_exact(capsys, write):
    path = write("two_cycles_6.json", serialize_instance(gen_two_cycles(6)))
    code, out, _ = run(capsys, "solve", "--in", path, "--objective", "mim", "--method", "exact")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == 1 and doc["method"] == "exact"


def test_solve_mum_exact(capsys, write):
    path = write("tc.json", serialize_instance(gen_two_cycles(6)))
    code, out, _ = run(capsys, "solve", "--in", path, "--objective", "mum", "--method", "exact")
    assert code == 0 and json.loads(out)["value"] == 5


def test_solve_flawed_counterexample(capsys, write):
    path = write("ce.json", serialize_instance(gen_counterexample().graph))
    code, out, err = run(capsys, "solve", "--in", path, "--method", "flawed")
    doc = json.loads(out)
    assert code == 2
    assert doc["notes"]["candidate_a"]["feasible"] is False
    assert doc["notes"]["candidate_b"]["feasible"] is False
    assert "no feasible solution" in err


def test_solve_auto_lp_gap(capsys, write):
    path = write("lp.json", serialize_instance(gen_lp_gap(3).graph))
    code, out, _ = run(capsys, "solve", "--in", path, "--method", "auto")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == 1
    assert doc["certified_ratio"]["kind"] == "inv_sqrt" and doc["certified_ratio"]["radicand"] == 32


@pytest.mark.parametrize("method", ["alg1", "alg2", "reduction", "trivial"])
def test_solve_methods_produce_feasible_output(capsys, write, method):
    path = write("tc.json", serialize_instance(gen_two_cycles(8)))
    code, out, _ = run(capsys, "solve", "--in", path, "--method", method)
    assert code == 0 and json.loads(out)["solution"] is not None


def test_solve_alg1_needs_two_stages(capsys, write):
    path = write("ce.json", serialize_instance(gen_counterexample().graph))
    code, _, err = run(capsys, "solve", "--in", path, "--method", "alg1")
    assert code == 1 and "alg1" in err


def test_solve_flawed_needs_four_stages(capsys, write):
    path = write("tc.json", serialize_instance(gen_two_cycles(6)))
    assert run(capsys, "solve", "--in", path, "--method", "flawed")[0] == 1


def test_solve_unknown_method(capsys, write):
    path = write("tc.json", serialize_instance(gen_two_cycles(6)))
    assert run(capsys, "solve", "--in", path, "--method", "magic")[0] == 1


def test_solve_infeasible_instance(capsys, write):
    path = write("bad.json", '{"n":4,"stages":[[[0,1],[2,3]],[[0,1],[1,2]]]}')
    code, _, err = run(capsys, "solve", "--in", path, "--method", "exact")
    assert code == 2 and "[2]" in err


def test_solve_malformed_instance(capsys, write):
    path = write("bad.json", '{"n":3,"stages":[[[0,1],[1,1]]]}')
    code, _, err = run(capsys, "solve", "--in", path)
    assert code == 1 and "self-loop" in err


def test_solve_missing_file(capsys, tmp_path):
    assert run(capsys, "solve", "--in", str(tmp_path / "nope.json"))[0] == 1


def test_generate_lp_gap(capsys):
    code, out, _ = run(capsys, "generate", "lp-gap", "--k", "3")
    assert code == 0 and parse_instance(out).n == 38


def test_generate_two_cycles_rejects_small_k(capsys):
    code, _, err = run(capsys, "generate", "two-cycles", "--k", "4")
    assert code == 1 and "share two edges" in err


def test_generate_needs_parameters(capsys):
    code, _, err = run(capsys, "generate", "random", "--n", "4")
    assert code == 1 and "--tau" in err


def test_generate_random_deterministic(capsys):
    args = ("generate", "random", "--n", "8", "--tau", "3", "--p", "0.4", "--seed", "7")
    first = run(capsys, *args)[1]
    assert first == run(capsys, *args)[1]
    assert parse_instance(first).tau == 3


def test_generate_maxcut_with_labels(capsys, tmp_path):
    out_path, labels_path = tmp_path / "g.json", tmp_path / "labels.json"
    code = main(["generate", "maxcut", "--edges", "0-1,1-2,0-2", "--out", str(out_path),
                 "--labels-out", str(labels_path)])
    assert code == 0
    g = parse_instance(out_path.read_text())
    assert g.meta["kappa"] == 9
    assert exact_solve(g, MIM).value == 11
    assert len(json.loads(labels_path.read_text())["labels"]) == 24


def test_generate_maxcut_bad_edges(capsys):
    assert run(capsys, "generate", "maxcut", "--edges", "0-x")[0] == 1


def test_verify_exact_solution(capsys, write):
    g = gen_two_cycles(6)
    res = exact_solve(g, MIM)
    inst = write("tc.json", serialize_instance(g))
    sol = write("sol.json", serialize_solution(res.solution))
    code, out, _ = run(capsys, "verify", "--in", inst, "--solution", sol)
    doc = json.loads(out)
    assert code == 0 and doc["feasible"] and doc["profit"] == 1


def test_verify_infeasible_solution(capsys, write):
    inst = write("tc.json", serialize_instance(gen_two_cycles(6)))
    sol = write("sol.json", '{"stages":[[[0,1]],[[0,1]]]}')
    code, out, _ = run(capsys, "verify", "--in", inst, "--solution", sol)
    assert code == 2 and json.loads(out)["feasible"] is False


def test_verify_stage_count_mismatch(capsys, write):
    inst = write("tc.json", serialize_instance(gen_two_cycles(6)))
    sol = write("sol.json", '{"stages":[[[0,1],[2,3],[4,5]]]}')
    assert run(capsys, "verify", "--in", inst, "--solution", sol)[0] == 1


def test_reduce_command(capsys, write):
    path = write("g.json", '{"n":4,"stages":[[[0,1],[1,2],[2,3]]]}')
    code, out, _ = run(capsys, "reduce", "--in", path)
    assert code == 0 and parse_instance(out).stage(1) == {(0, 1), (2, 3)}


def test_certify_gap_command(capsys):
    code, out, _ = run(capsys, "certify-gap", "--k", "4")
    doc = json.loads(out)
    assert code == 0
    assert (doc["ip_opt"], doc["lp_lb"], doc["gap_lb"]) == (1, "5", "5")


def test_certify_gap_bad_k(capsys):
    assert run(capsys, "certify-gap", "--k", "2")[0] == 1


def test_export_lp(capsys, write):
    path = write("tc.json", serialize_instance(gen_two_cycles(6)))
    code, out, _ = run(capsys, "export-lp", "--in", path)
    assert code == 0 and out.startswith("\\") and "Subject To" in out


def test_export_lp_needs_two_stages(capsys, write):
    path = write("ce.json", serialize_instance(gen_counterexample().graph))
    assert run(capsys, "export-lp", "--in", path)[0] == 1


def test_bench_bounds_hold():
    rows = bench_rows(8, 3, 50, 1, 0.4, 10**6)
    assert len(rows) == 50
    assert all(r["alg2_ok"] and r["reduction_ok"] and r["auto_ok"] for r in rows)


def test_bench_table(capsys):
    code, out, _ = run(capsys, "bench", "--n", "6", "--tau", "3", "--count", "5", "--seed", "2")
    assert code == 0 and "bound held 5/5" in out


def test_bench_json(capsys):
    code, out, _ = run(capsys, "bench", "--n", "4", "--tau", "2", "--count", "3", "--json")
    assert code == 0 and len(json.loads(out)) == 3


def test_no_command_is_usage_error(capsys):
    assert run(capsys)[0] == 1
