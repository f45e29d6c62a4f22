"""End-to-end tests of the command-line interface."""

import json

import pytest
from click.testing import CliRunner

from ckq.cli import cli


@pytest.fixture
def runner():
    return CliRunner()


def lines_of(result):
    return [ln for ln in result.output.splitlines() if ln.strip()]


# -- pim --------------------------------------------------------------------


def test_pim_eval(runner):
    res = runner.invoke(cli, ["pim", "eval", "1 + 2*i1 - 0.5*i1*i2"])
    assert res.exit_code == 0
    assert "i1" in res.output


def test_pim_eval_exp(runner):
    res = runner.invoke(cli, ["pim", "eval", "i1", "--apply", "exp"])
    assert res.exit_code == 0
    assert res.output.startswith("1")


def test_pim_eval_bad_expression(runner):
    res = runner.invoke(cli, ["pim", "eval", "1 + * 2"])
    assert res.exit_code == 2


# -- ck ---------------------------------------------------------------------


def test_ck_rotate_table(runner):
    res = runner.invoke(
        cli,
        ["ck", "rotate", "--n", "3", "--j", "1,1", "--plane", "1,2", "--phi", "0.3", "--format", "table"],
    )
    assert res.exit_code == 0
    assert len(lines_of(res)) == 3


def test_ck_orbit_csv_invariant(runner):
    res = runner.invoke(
        cli, ["ck", "orbit", "--plane", "minkowski", "--from", "1,0", "--steps", "5"]
    )
    assert res.exit_code == 0
    rows = lines_of(res)
    assert rows[0] == "phi,x0,x1"
    for row in rows[1:]:
        _, x0, x1 = (float(p) for p in row.split(","))
        assert abs(x0 * x0 - x1 * x1 - 1.0) <= 1e-9


def test_ck_verify_classical(runner):
    res = runner.invoke(cli, ["ck", "verify", "classical", "--n", "4"])
    assert res.exit_code == 0
    for ln in lines_of(res):
        assert json.loads(ln)["pass"]


# -- exit-code contract -----------------------------------------------------


def test_unknown_signature_token_is_usage_error(runner):
    res = runner.invoke(cli, ["verify", "all", "--j", "1,x"])
    assert res.exit_code == 2


def test_imaginary_slot_rejected_by_quantum_commands(runner):
    res = runner.invoke(cli, ["frt", "verify", "qybe", "--j", "1,i"])
    assert res.exit_code == 2
    assert "1 and n" in res.output


def test_verify_all_contracted(runner):
    res = runner.invoke(cli, ["verify", "all", "--j", "n,n"])
    assert res.exit_code == 0, res.output
    reports = [json.loads(ln) for ln in lines_of(res)]
    assert len(reports) >= 20
    assert all(r["pass"] for r in reports)
    assert [r["check"] for r in reports] == sorted(r["check"] for r in reports)


def test_verify_all_trivial(runner):
    res = runner.invoke(cli, ["verify", "all", "--j", "1,1", "--v", "0.37"])
    assert res.exit_code == 0, res.output


def test_reports_deterministic(runner):
    args = ["verify", "frt", "--j", "1,n", "--v", "0.37"]
    out1 = runner.invoke(cli, args).output
    out2 = runner.invoke(cli, args).output
    assert out1 == out2


# -- frt --------------------------------------------------------------------


def test_frt_rmatrix_json(runner):
    res = runner.invoke(cli, ["frt", "rmatrix", "--j", "1,1", "--v", "0.37", "--format", "json"])
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["size"] == 9


def test_frt_relations_schema(runner):
    res = runner.invoke(cli, ["frt", "relations", "--j", "1,n", "--v", "0.37"])
    assert res.exit_code == 0
    data = json.loads(res.output)
    term = data["relations"][0]["terms"][0]
    assert set(term) == {"iota", "word", "re", "im"}


def test_frt_verify_single_check(runner):
    res = runner.invoke(cli, ["frt", "verify", "qybe", "--j", "n,1", "--v", "0.61+0.29i"])
    assert res.exit_code == 0
    (report,) = [json.loads(ln) for ln in lines_of(res)]
    assert report["check"] == "frt.qybe" and report["pass"]


# -- dual -------------------------------------------------------------------


def test_dual_verify_single_check(runner):
    res = runner.invoke(
        cli, ["dual", "verify", "commutators", "--j", "n,n", "--v", "0.37"]
    )
    assert res.exit_code == 0
    (report,) = [json.loads(ln) for ln in lines_of(res)]
    assert report["check"] == "dual.commutators" and report["pass"]


def test_dual_verify_truncation_flag(runner):
    res = runner.invoke(
        cli, ["dual", "verify", "sow-hopf", "--j", "1,1", "--trunc", "6"]
    )
    assert res.exit_code == 0
    (report,) = [json.loads(ln) for ln in lines_of(res)]
    assert report["truncation"] == 6


# -- emit -------------------------------------------------------------------


def test_emit_contracted_rmatrix_structure(runner):
    res = runner.invoke(cli, ["emit", "rmatrix", "--j", "n,1", "--v", "1", "--format", "table"])
    assert res.exit_code == 0
    rows = lines_of(res)
    assert len(rows) == 9
    assert "i1" in res.output  # nilpotent first-order structure visible


def test_emit_pairing_table_json(runner):
    res = runner.invoke(cli, ["emit", "pairing-table", "--j", "1,1", "--v", "0.37", "--format", "json"])
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert "l11(t22)" in data


def test_emit_orbit_to_file(runner, tmp_path):
    out = tmp_path / "orbit.csv"
    res = runner.invoke(
        cli, ["emit", "orbit", "--plane", "euclid", "--steps", "4", "--out", str(out)]
    )
    assert res.exit_code == 0
    assert out.read_text().startswith("phi,x0,x1")


# -- config file ------------------------------------------------------------


def test_config_file_keys(runner, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("signature = n,n\nseed = 1234\n# comment\n")
    res = runner.invoke(cli, ["verify", "classical", "--config", str(conf)])
    assert res.exit_code == 0


def test_config_file_parse_error(runner, tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("this is not a key value pair\n")
    res = runner.invoke(cli, ["verify", "classical", "--config", str(conf)])
    assert res.exit_code == 2
    assert "key=value" in res.output
