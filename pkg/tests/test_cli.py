"""End-to-end CLI behavior: JSON piping, round trips, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

import gptkit as g
from gptkit import io as gio
from gptkit.sampling import random_state, trial_rng


def run_cli(args, stdin=None):
    proc = subprocess.run(
        [sys.executable, "-m", "gptkit", *args],
        input=stdin,
        capture_output=True,
        text=True,
    )
    return proc


def chi4_json():
    return gio.dumps(gio.state_to_json(g.invariant_state(g.make_classical(4))))


def test_diagonalize_invariant_state():
    proc = run_cli(["diagonalize"], stdin=chi4_json())
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert np.max(np.abs(np.array(payload["eigenvalues"]) - 0.25)) < 1e-12


def test_diagonalize_recompose_roundtrip(tmp_path):
    rng = trial_rng(100, 0)
    comp = g.compose(g.make_classical(2), g.make_coherent(2))
    rho = random_state(comp, rng)
    rho = g.State(comp, [b / rho.trace for b in rho.blocks])
    state_json = gio.dumps(gio.state_to_json(rho))
    diag = run_cli(["diagonalize"], stdin=state_json)
    assert diag.returncode == 0
    recomposed = run_cli(["recompose"], stdin=diag.stdout)
    assert recomposed.returncode == 0
    back = gio.state_from_json(json.loads(recomposed.stdout))
    residual = max(
        float(np.max(np.abs(a - b))) for a, b in zip(back.blocks, rho.blocks)
    )
    assert residual < 1e-9


def test_outputs_are_idempotent():
    state_json = chi4_json()
    a = run_cli(["diagonalize", "--seed", "5"], stdin=state_json)
    b = run_cli(["diagonalize", "--seed", "5"], stdin=state_json)
    assert a.stdout == b.stdout
    v1 = run_cli(
        ["verify", "--suite", "lemma2-double-stochasticity", "--theory", "qubit",
         "--trials", "5", "--seed", "3"]
    )
    v2 = run_cli(
        ["verify", "--suite", "lemma2-double-stochasticity", "--theory", "qubit",
         "--trials", "5", "--seed", "3"]
    )
    assert v1.stdout == v2.stdout


def test_schmidt_subcommand():
    cbit = g.make_classical(2)
    rho = g.State(cbit, [[[0.3]], [[0.7]]])
    psi, _ = g.purify(rho)
    proc = run_cli(["schmidt"], stdin=gio.dumps(gio.state_to_json(psi)))
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["rank"] == 2
    assert abs(payload["probabilities"][0] - 0.7) < 1e-12


def test_entropy_subcommand():
    proc = run_cli(["entropy"], stdin=chi4_json())
    payload = json.loads(proc.stdout)
    assert abs(payload["entropy"] - 2.0) < 1e-12
    assert payload["log_base"] == 2.0
    proc = run_cli(["entropy", "--alpha", "2"], stdin=chi4_json())
    assert abs(json.loads(proc.stdout)["entropy"] - 2.0) < 1e-12


def test_entropy_divergence_flag(tmp_path):
    other = tmp_path / "sigma.json"
    q = g.make_quantum(2)
    sigma = g.State(q, [np.diag([0.8, 0.2])])
    other.write_text(gio.dumps(gio.state_to_json(sigma)))
    rho_json = gio.dumps(gio.state_to_json(g.invariant_state(q)))
    proc = run_cli(["entropy", "--divergence", str(other)], stdin=rho_json)
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["divergence"] > 0.0


def test_gibbs_subcommand(tmp_path):
    q3 = g.make_quantum(3)
    h = g.Observable(q3, [np.diag([0.0, 0.5, 1.0])])
    hpath = tmp_path / "h.json"
    hpath.write_text(gio.dumps(gio.observable_to_json(h)))
    proc = run_cli(["gibbs", "--hamiltonian", str(hpath), "--beta", "0"])
    assert proc.returncode == 0
    state = gio.state_from_json(json.loads(proc.stdout))
    chi = g.invariant_state(q3)
    assert np.max(np.abs(state.blocks[0] - chi.blocks[0])) < 1e-14
    proc = run_cli(["gibbs", "--hamiltonian", str(hpath), "--energy", "0.25"])
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["beta"] > 0.0


def test_landauer_subcommand():
    proc = run_cli(
        ["landauer", "--beta", "1.5", "--trials", "3", "--seed", "9"]
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["max_residual"] <= 1e-8
    assert len(payload["reports"]) == 3
    worst = payload["worst_trial"]
    for key in ("lhs", "entropy_drop", "mutual_info", "divergence", "residual"):
        assert key in worst


def test_naimark_subcommand():
    q = g.make_quantum(2)
    payload = {
        "system": gio.descriptor_to_json(q),
        "effects": [
            gio.effect_to_json(g.Effect(q, [np.diag([0.7, 0.2])]))["blocks"][0],
            gio.effect_to_json(g.Effect(q, [np.diag([0.3, 0.8])]))["blocks"][0],
        ],
    }
    proc = run_cli(["naimark"], stdin=gio.dumps(payload))
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out["orthogonality_residual"] <= 1e-9
    assert len(out["projections"]) == 2


def test_distinguish_subcommand():
    q = g.make_quantum(3)
    vectors = g.maximal_set(q)
    payload = {
        "states": [gio.state_to_json(v.as_state()) for v in vectors],
        "effects": [gio.effect_to_json(v.as_effect()) for v in vectors],
    }
    proc = run_cli(["distinguish"], stdin=gio.dumps(payload))
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["residual"] <= 1e-9


def test_purify_subcommand():
    cbit = g.make_classical(2)
    rho = g.State(cbit, [[[0.3]], [[0.7]]])
    proc = run_cli(["purify"], stdin=gio.dumps(gio.state_to_json(rho)))
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["marginal_residual"] <= 1e-10
    psi = gio.state_from_json(payload)
    assert psi.is_pure


def test_verify_single_suite_passes():
    proc = run_cli(
        ["verify", "--suite", "thm3-diagonalization", "--theory", "qutrit",
         "--trials", "10", "--seed", "1"]
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["pass"] is True


def test_verify_all_small():
    proc = run_cli(
        ["verify", "--all", "--theory", "qubit", "--trials", "2", "--seed", "0",
         "--format", "pretty"]
    )
    assert proc.returncode == 0
    lines = [l for l in proc.stdout.splitlines() if l.strip()]
    assert len(lines) == len(g.SUITES)
    assert all(line.startswith("PASS") for line in lines)


def test_verify_reports_failure_with_exit_one():
    proc = run_cli(
        ["verify", "--suite", "thm3-diagonalization", "--theory", "qubit",
         "--trials", "2", "--seed", "0", "--tol", "0"]
    )
    assert proc.returncode == 1


def test_malformed_json_exits_two():
    proc = run_cli(["diagonalize"], stdin="{not json")
    assert proc.returncode == 2
    assert "error" in proc.stderr


def test_schema_error_exits_two():
    proc = run_cli(["diagonalize"], stdin='{"blocks": []}')
    assert proc.returncode == 2


def test_unknown_suite_exits_two():
    proc = run_cli(["verify", "--suite", "nope", "--theory", "qubit"])
    assert proc.returncode == 2


def test_unknown_flag_rejected():
    proc = run_cli(["diagonalize", "--bogus"], stdin=chi4_json())
    assert proc.returncode == 2


def test_dimension_mismatch_exits_two():
    q = g.make_quantum(2)
    payload = {"system": gio.descriptor_to_json(q), "blocks": [[[1.0]]]}
    proc = run_cli(["diagonalize"], stdin=gio.dumps(payload))
    assert proc.returncode == 2
