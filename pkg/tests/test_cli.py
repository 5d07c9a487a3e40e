"""CLI exit codes, report determinism, and flag handling."""

import io
import json
import os
import sys
from contextlib import redirect_stdout

import pytest

from anop.cli import main
from anop.gallery import example2, nilpotent_pair
from anop.operators import adjoint
from anop.serialize import serialize


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


@pytest.fixture()
def shift_file(tmp_path):
    code, out = run_cli(["gallery", "right_shift"])
    assert code == 0
    p = tmp_path / "shift.json"
    p.write_text(out)
    return str(p)


def test_check_hyponormal_shift_exit_zero(shift_file):
    code, out = run_cli(["check", shift_file, "--predicate", "hyponormal",
                         "--samples", "200"])
    assert code == 0
    assert "Proven" in out


def test_check_an_example2_adjoint_exit_one(tmp_path):
    p = tmp_path / "ex2_adj.json"
    p.write_text(serialize(adjoint(example2())))
    code, out = run_cli(["check", str(p), "--predicate", "an"])
    assert code == 1


def test_check_star_paranormal_nilpotent_witness(tmp_path):
    p = tmp_path / "nil.json"
    p.write_text(serialize(nilpotent_pair()))
    code, out = run_cli(["check", str(p), "--predicate", "star-paranormal",
                         "--samples", "200", "--json"])
    assert code == 1
    body = json.loads(out)
    assert body["report"]["witness"] is not None


def test_spectrum_modulus_example1(tmp_path):
    code, out = run_cli(["gallery", "example1"])
    p = tmp_path / "ex1.json"
    p.write_text(out)
    code, out = run_cli(["spectrum", str(p), "--of", "modulus", "--json"])
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["m"] == 1.0 and rep["m_e"] == 2.0 and rep["norm"] == 2.0


def test_spectrum_identity_ess(tmp_path):
    p = tmp_path / "id.json"
    p.write_text('{"builtin": "identity"}')
    code, out = run_cli(["spectrum", str(p), "--of", "T*T", "--json"])
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["ess"][0]["point"] == [1, 0]


def test_spectrum_ttstar_example2(tmp_path):
    p = tmp_path / "ex2.json"
    p.write_text(serialize(example2()))
    code, out = run_cli(["spectrum", str(p), "--of", "TT*", "--json"])
    assert code == 0
    rep = json.loads(out)["report"]
    pts = [e["point"] for e in rep["ess"]]
    assert pts == [[0, 0], [1, 0]]


def test_spectrum_of_shift_gram(shift_file):
    code, out = run_cli(["spectrum", shift_file, "--of", "T*T", "--json"])
    assert code == 0
    assert json.loads(out)["report"]["norm"] == 1.0


def test_decompose_theorem_form_exit_zero(tmp_path):
    code, out = run_cli(["gallery", "theorem_form", "--params",
                         '{"levels": [[3, [[0, 1], [1, 0]]]], "m_e": 2}'])
    assert code == 0
    p = tmp_path / "tf.json"
    p.write_text(out)
    code, out = run_cli(["decompose", str(p), "--samples", "300", "--json"])
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["s_star_a_norm"] == 0.0


def test_decompose_refuted_exit_four(tmp_path):
    p = tmp_path / "nil.json"
    p.write_text(serialize(nilpotent_pair()))
    code, _ = run_cli(["decompose", str(p), "--samples", "200"])
    assert code == 4


def test_certify_exit_codes(tmp_path, shift_file):
    code, out = run_cli(["gallery", "theorem_form", "--params",
                         '{"levels": [[3, [[0, 1], [1, 0]]]], "m_e": 2, '
                         '"tail_power": 1}'])
    p = tmp_path / "inv.json"
    p.write_text(out)
    # the tail is a strict shift, not invertible: certify should be 2
    code, _ = run_cli(["certify", str(p), "--samples", "200"])
    assert code == 2
    p2 = tmp_path / "scaled_id.json"
    p2.write_text('{"builtin": "identity", "scale": 2}')
    code, _ = run_cli(["certify", str(p2), "--samples", "100"])
    assert code == 0


def test_parse_error_exit_65(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{broken")
    code, _ = run_cli(["check", str(p), "--predicate", "normal"])
    assert code == 65


def test_usage_error_exit_64():
    with pytest.raises(SystemExit) as exc:
        run_cli(["check", "x.json", "--predicate", "bogus"])
    assert exc.value.code == 64


def test_reports_byte_identical(shift_file):
    argv = ["check", shift_file, "--predicate", "star-paranormal",
            "--samples", "300", "--json"]
    c1, out1 = run_cli(argv)
    c2, out2 = run_cli(argv)
    assert c1 == c2 and out1.encode() == out2.encode()


def test_report_embeds_config_and_version(shift_file):
    _, out = run_cli(["check", shift_file, "--predicate", "normal", "--json"])
    body = json.loads(out)
    assert body["version"]
    assert set(body["config"]) == {"tol", "trunc", "samples", "seed", "k_grid",
                                   "max_peel", "output"}


def test_env_seed_override(shift_file, monkeypatch):
    monkeypatch.setenv("ANOP_SEED", "7")
    _, out = run_cli(["check", shift_file, "--predicate", "paranormal",
                      "--samples", "50", "--json"])
    body = json.loads(out)
    assert body["config"]["seed"] == 7


def test_audit_command():
    code, out = run_cli(["audit", "--samples", "800"])
    assert code == 0
    assert "DISAGREE" in out and "example2.ess_TTstar" in out
