import json
import math

import numpy as np
import pytest

from cteleport import cli, fock, sweeps, validation

HEADER = "case,eta,alpha,x_re,x_im,y_re,y_im,success_prob,entanglement_bits,min_conclusive_fidelity"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_teleport_case_a_report(capsys, tmp_path):
    path = tmp_path / "rec.json"
    code, out, err = run(
        capsys, "teleport", "--case", "a", "--eta", repr(math.pi / 4), "--out", str(path)
    )
    assert code == 0 and err == ""
    assert "success probability  0.5000000000" in out
    assert out.count("P=0.2500000000  branch") == 2
    rec = json.loads(path.read_text())
    assert rec["success_prob"] == pytest.approx(0.5)
    assert sum(o["probability"] for o in rec["outcomes"]) == pytest.approx(1.0)


def test_teleport_case_b_and_c(capsys):
    code, out, _ = run(capsys, "teleport", "--case", "b", "--eta", repr(math.pi / 6))
    assert code == 0 and "success probability  0.2500000000" in out
    code, out, _ = run(capsys, "teleport", "--case", "c", "--x-re", "1", "--y-re", "0")
    assert code == 0
    p = float(out.split("success probability")[1].split()[0])
    assert p >= 0.99


def test_teleport_oracle_cutoff_too_small_is_tolerance_breach(capsys):
    code, out, err = run(capsys, "teleport", "--case", "c", "--cutoff", "9")
    assert code == cli.EXIT_TOLERANCE
    assert "leaked" in err and out == ""


def test_usage_errors(capsys):
    assert run(capsys, "teleport", "--case", "z")[0] == cli.EXIT_USAGE
    assert run(capsys, "teleport", "--case", "a", "--case", "c")[0] == cli.EXIT_USAGE
    assert run(capsys, "teleport", "--eta", "1.0")[0] == cli.EXIT_USAGE
    assert run(capsys, "sweep-eta", "--steps", "1")[0] == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep-eta", "--no-such-flag"])
    assert exc.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == cli.EXIT_USAGE


def test_unwritable_output(capsys, tmp_path):
    target = tmp_path / "missing_dir" / "f.csv"
    code, _, err = run(capsys, "sweep-eta", "--case", "a", "--steps", "2", "--out", str(target))
    assert code == cli.EXIT_USAGE and "error" in err


def test_sweep_eta_csv(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "sweep-eta", "--case", "a,c", "--steps", "50", "--out", str(path))
    assert code == 0 and out == ""
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == HEADER and len(lines) == 101
    rows = sweeps.read_sweep_csv(path)
    a = {r.eta: r.success_prob for r in rows if r.case == "a"}
    c = {r.eta: r.success_prob for r in rows if r.case == "c"}
    assert a.keys() == c.keys()
    assert all(c[e] >= a[e] for e in a)
    assert a[min(a)] == pytest.approx(math.sin(0.05) ** 2, abs=1e-12)
    assert a[max(a)] == pytest.approx(0.5, abs=1e-11)


def test_sweep_values_round_trip(tmp_path):
    path = tmp_path / "rt.csv"
    rows = sweeps.sweep_eta("abc", sweeps.eta_grid(0.1, 0.7, 4), x=0.6, y=0.8j)
    sweeps.write_csv(rows, sweeps.SweepRow, path)
    for row in sweeps.read_sweep_csv(path):
        again = sweeps.recompute(row)
        assert again.success_prob == pytest.approx(row.success_prob, abs=1e-9)


def test_sweep_entropy_csv(capsys):
    code, out, _ = run(capsys, "sweep-entropy", "--steps", "5", "--eta-start", "0.2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "state,eta,alpha,entanglement_bits"
    rows = [line.split(",") for line in lines[1:]]
    photon = {float(r[1]): float(r[3]) for r in rows if r[0] == sweeps.SINGLE_PHOTON}
    cat = {float(r[1]): float(r[3]) for r in rows if r[0] == sweeps.CAT}
    assert photon[max(photon)] == pytest.approx(1.0, abs=1e-11)
    assert all(cat[e] >= photon[e] for e in photon)


def test_prob_vs_entropy_pairs_share_the_parameter(capsys):
    code, out, _ = run(capsys, "prob-vs-entropy", "--case", "a", "--case", "b", "--steps", "6")
    assert code == 0
    for line in out.splitlines()[1:]:
        _, eta, _, e, p = line.split(",")
        q = math.sin(float(eta)) ** 2
        assert float(p) == pytest.approx(q, abs=1e-11)
        h = -q * math.log2(q) - (1 - q) * math.log2(1 - q)
        assert float(e) == pytest.approx(h, abs=1e-11)


def test_config_file_and_precedence(capsys, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# demo\ncase = c\nalpha = 2.5\neta-start = 0.2\nsteps = 3\n")
    code, out, _ = run(capsys, "sweep-eta", "--config", str(conf), "--steps", "4", "--show-config")
    assert code == 0
    cfg = dict(line.split(" = ", 1) for line in out.splitlines())
    assert cfg["case"] == "c" and cfg["alpha"] == "2.5" and cfg["steps"] == "4"
    assert cfg["eta_start"] == "0.2"
    conf.write_text("colour = blue\n")
    assert run(capsys, "sweep-eta", "--config", str(conf))[0] == cli.EXIT_USAGE
    assert run(capsys, "sweep-eta", "--config", str(tmp_path / "missing"))[0] == cli.EXIT_USAGE


def test_show_config_lists_defaults(capsys):
    code, out, _ = run(capsys, "teleport", "--show-config")
    assert code == 0
    assert "alpha = 3.0" in out and "eta_start = 0.05" in out and "case = a" in out


def test_validate_passes(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == 0
    assert out.count("PASS") == len(validation.GROUPS)


def test_validate_flags_wrong_beam_splitter_sign(capsys, monkeypatch):
    real = fock.beam_splitter_matrix

    def flipped(transmission, reflection=None):
        return real(transmission, reflection).T

    monkeypatch.setattr(fock, "beam_splitter_matrix", flipped)
    results = {name: ok for name, ok, _ in validation.run_all()}
    assert not results["number_network_output"]
    assert results["fock_unitarity"]
    code, out, err = run(capsys, "validate")
    assert code == cli.EXIT_VALIDATION
    assert "FAIL  number_network_output" in out
    assert "number_network_output" in err


def test_validate_flags_small_cutoff(capsys):
    code, out, err = run(capsys, "validate", "--cutoff", "9")
    assert "coherent_fock_equivalence" in err
    assert code == cli.EXIT_VALIDATION
    line = next(l for l in out.splitlines() if "coherent_fock_equivalence" in l)
    assert line.startswith("FAIL") and "leak" in line


def test_eta_grid():
    g = sweeps.eta_grid(0.05, math.pi / 4, 50)
    assert len(g) == 50 and g[-1] <= math.pi / 4 and np.all(np.diff(g) > 0)
    with pytest.raises(ValueError):
        sweeps.eta_grid(0.5, 0.4, 5)
    with pytest.raises(ValueError):
        sweeps.eta_grid(0.1, 0.9, 5)


def test_fmt():
    assert sweeps.fmt(None) == ""
    assert sweeps.fmt(0.1 + 0.2) == "0.3"
    assert sweeps.fmt(1 / 3) == "0.333333333333"
