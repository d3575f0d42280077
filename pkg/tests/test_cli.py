"""Exit codes, stream discipline, and adapter faithfulness of the CLI."""

import json

import pytest

from nilq.cli import main
from nilq.randwalk import (
    ExperimentConfig,
    coordinate_clt_stats,
    clt_csv,
    rank_experiment_csv,
    return_probability_exact,
    return_table_csv,
)


FULL_RANK = "2 2\na1^2\na2^2\n"
DEFICIENT = "2 2\na1^2 a2^2\na1 a2\n"


@pytest.fixture
def pres(tmp_path):
    p = tmp_path / "pres.txt"
    p.write_text(FULL_RANK)
    return str(p)


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_classify_json_on_stdout(capsys, pres):
    code, out, err = _run(capsys, "classify", pres)
    assert code == 0
    data = json.loads(out)
    assert data["regime"] == "FINITE"
    assert err  # human summary on stderr


def test_normalize_output(capsys, pres):
    code, out, _ = _run(capsys, "normalize", pres)
    assert code == 0
    data = json.loads(out)
    assert data["alphas"] == [2, 2]
    assert data["rank_full"] is True
    assert data["rewritten_relators"]


def test_is_trivial(capsys, pres):
    code, out, _ = _run(capsys, "is-trivial", pres, "[a1,a2]^2")
    assert code == 0
    data = json.loads(out)
    assert data["trivial_in_G"] is True
    code, out, _ = _run(capsys, "is-trivial", pres, "[a1,a2]")
    assert json.loads(out)["trivial_in_G"] is False


def test_is_trivial_handles_generator_substitution(capsys, tmp_path):
    p = tmp_path / "sub.txt"
    p.write_text("2 2\na1 a2\n")
    code, out, _ = _run(capsys, "is-trivial", str(p), "a1 a2")
    assert code == 0 and json.loads(out)["trivial_in_G"] is True
    code, out, _ = _run(capsys, "is-trivial", str(p), "a1")
    assert code == 0 and json.loads(out)["trivial_in_G"] is False


def test_word_eval_infers_rank(capsys):
    code, out, _ = _run(capsys, "word-eval", "a2 a1")
    assert code == 0
    data = json.loads(out)
    assert data["m"] == 2
    assert data["alpha"] == [1, 1]
    assert data["gamma"] == [-1]


def test_word_eval_explicit_rank(capsys):
    code, out, _ = _run(capsys, "word-eval", "a1", "--m", "3")
    data = json.loads(out)
    assert data["alpha"] == [1, 0, 0]


def test_rank_exp_matches_library(capsys, tmp_path):
    cfg = {"m": 2, "r": 1, "lengths": [5, 9], "trials": 30, "seed": 12}
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps(cfg))
    code, out, _ = _run(capsys, "rank-exp", str(f))
    assert code == 0
    expected = rank_experiment_csv(ExperimentConfig(2, 1, (5, 9), 30, 12))
    assert out == expected
    assert '"seed": 12' in out.splitlines()[0]


def test_clt_csv_matches_library(capsys):
    code, out, _ = _run(capsys, "clt", "--m", "2", "--n", "50", "--trials", "40", "--seed", "6")
    assert code == 0
    assert out == clt_csv(coordinate_clt_stats(2, 50, 40, 6))


def test_escape_grid(capsys):
    code, out, _ = _run(
        capsys, "escape", "--m", "2", "--n", "30", "--n", "60",
        "--trials", "20", "--seed", "4",
    )
    assert code == 0
    body = out.strip().split("\n")
    assert len(body) == 4
    assert body[2].startswith("30,") and body[3].startswith("60,")


def test_return_prob_csv(capsys):
    code, out, _ = _run(capsys, "return-prob", "--m", "1", "--n-max", "6")
    assert code == 0
    assert out == return_table_csv(return_probability_exact(1, 6))


def test_slope_csv(capsys):
    code, out, _ = _run(capsys, "slope", "--m", "1", "--n-lo", "50", "--n-hi", "80")
    assert code == 0
    header = out.strip().split("\n")[1]
    assert header == "m,n_lo,n_hi,slope,intercept"


def test_sz_check_json_format(capsys):
    code, out, _ = _run(capsys, "sz-check", "--r", "1", "--m", "2", "--b", "1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["holds"] is True and data["zero_count"] == 1


def test_compile_then_solve(capsys, tmp_path):
    ring = tmp_path / "ring.json"
    ring.write_text(json.dumps({
        "variables": ["x"],
        "equations": [[["*", ["var", "x"], ["var", "x"]], ["const", 4]]],
    }))
    code, out, _ = _run(capsys, "compile", str(ring))
    assert code == 0
    group = tmp_path / "group.json"
    group.write_text(out)
    code, out, _ = _run(capsys, "solve-bounded", str(group), "--box", "8", "--first")
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "group"
    assert len(data["solutions"]) == 1


def test_solve_bounded_ring(capsys, tmp_path):
    ring = tmp_path / "ring.json"
    ring.write_text(json.dumps({
        "variables": ["x"],
        "equations": [[["*", ["var", "x"], ["var", "x"]], ["const", 4]]],
    }))
    code, out, _ = _run(capsys, "solve-bounded", str(ring), "--box", "5")
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "ring"
    assert data["solutions"] == [{"x": -2}, {"x": 2}]


def test_verify_small(capsys, tmp_path):
    ring = tmp_path / "ring.json"
    ring.write_text(json.dumps({
        "variables": ["x"],
        "equations": [[["var", "x"], ["const", 0]]],
    }))
    code, out, _ = _run(capsys, "verify", str(ring), "--box-ring", "2", "--box-group", "3")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True


def test_domain_error_exit_1(capsys, tmp_path):
    p = tmp_path / "weak.txt"
    p.write_text(DEFICIENT)
    code, out, _ = _run(capsys, "is-trivial", str(p), "a1")
    assert code == 1
    data = json.loads(out)
    assert data["error"] == "InconclusiveError"


def test_usage_errors_exit_2(capsys, tmp_path):
    code, _, _ = _run(capsys, "classify", str(tmp_path / "missing.txt"))
    assert code == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\nb1\n")
    code, _, _ = _run(capsys, "classify", str(bad))
    assert code == 2
    code, _, _ = _run(capsys, "clt", "--m", "2")  # missing required seed
    assert code == 2
    code, _, _ = _run(capsys, "no-such-command")
    assert code == 2


def test_bad_word_argument_exit_2(capsys, pres):
    code, _, _ = _run(capsys, "is-trivial", pres, "a1^")
    assert code == 2


def test_jobs_flag_accepted(capsys):
    code, out, _ = _run(capsys, "--jobs", "4", "word-eval", "a1", "--m", "2")
    assert code == 0
    assert json.loads(out)["alpha"] == [1, 0]
