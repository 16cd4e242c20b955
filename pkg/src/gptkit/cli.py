"""Command-line front end: JSON in, JSON out.

Subcommands: diagonalize, recompose, schmidt, entropy, gibbs, landauer,
naimark, distinguish, verify, purify.  Input is read from a path or from
standard input; all data goes to stdout, diagnostics to stderr.  Exit
codes: 0 success/pass, 1 suite failure, 2 usage/IO/schema errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import io as gio
from .entropy import kl_divergence, renyi, shannon_vn
from .errors import GptError, SchemaError, UnknownSuite
from .sectors import (
    SystemDescriptor,
    compose,
    describe,
    make_classical,
    make_coherent,
    make_quantum,
)
from .spectral import diagonalize, schmidt
from .statespace import State, marginal, purify
from .suites import SUITES, default_theories, run_suite
from .thermo import Hamiltonian, ThermoConfig, beta_of_energy, gibbs_state, landauer_report
from .channels import distinguishability_protocol, naimark, random_reversible

PRESETS = {
    "qubit": lambda: make_quantum(2),
    "qutrit": lambda: make_quantum(3),
    "rebit": lambda: make_quantum(2, "real"),
    "cbit": lambda: make_classical(2),
    "cobit": lambda: make_coherent(2),
    "cbit-cobit": lambda: compose(make_classical(2), make_coherent(2)),
}


def _load_json(path: str | None):
    try:
        if path is None or path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}")
    except OSError as exc:
        raise SchemaError(f"cannot read input: {exc}")


def _emit(payload, fmt: str):
    sys.stdout.write(gio.dumps(payload, pretty=(fmt == "pretty")) + "\n")


def _theory_arg(text: str) -> SystemDescriptor:
    if text in PRESETS:
        return PRESETS[text]()
    return gio.descriptor_from_json(json.loads(text))


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("input", nargs="?", default=None, help="input JSON path (default: stdin)")
    p.add_argument("--format", choices=["json", "pretty"], default="json")


def _cmd_diagonalize(args) -> int:
    rho = gio.state_from_json(_load_json(args.input))
    rng = None if args.seed is None else np.random.default_rng(args.seed)
    diag = diagonalize(rho, rng=rng)
    payload = {
        "system": gio.descriptor_to_json(rho.system),
        "eigenvalues": list(diag.eigenvalues),
        "eigenstates": [gio.pure_vector_to_json(v) for v in diag.eigenstates],
        "grouped": [
            {"value": lam, "projector": gio.observable_to_json(pi)["blocks"]}
            for lam, pi in diag.grouped
        ],
    }
    _emit(payload, args.format)
    return 0


def _cmd_recompose(args) -> int:
    data = _load_json(args.input)
    try:
        system = gio.descriptor_from_json(data["system"])
        values = [float(x) for x in data["eigenvalues"]]
        vectors = [gio.pure_vector_from_json(v, system) for v in data["eigenstates"]]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed diagonalization payload: {exc}")
    blocks = [
        np.zeros((len(s), len(s)), dtype=system.dtype) for s in system.sectors
    ]
    for p, v in zip(values, vectors):
        blocks[v.sector] = blocks[v.sector] + p * np.outer(
            v.amplitudes, v.amplitudes.conj()
        )
    _emit(gio.state_to_json(State(system, blocks)), args.format)
    return 0


def _cmd_schmidt(args) -> int:
    psi = gio.state_from_json(_load_json(args.input))
    sd = schmidt(psi)
    fa, fb = psi.system.factors
    payload = {
        "rank": sd.rank,
        "probabilities": list(sd.probabilities),
        "left": [gio.pure_vector_to_json(v) for v in sd.left],
        "right": [gio.pure_vector_to_json(v) for v in sd.right],
        "left_system": gio.descriptor_to_json(fa),
        "right_system": gio.descriptor_to_json(fb),
    }
    _emit(payload, args.format)
    return 0


def _cmd_entropy(args) -> int:
    rho = gio.state_from_json(_load_json(args.input))
    base = args.base
    diag = diagonalize(rho)
    if abs(args.alpha - 1.0) < 1e-12:
        value = shannon_vn(rho, base)
    else:
        value = renyi(rho, args.alpha, base)
    payload = {
        "entropy": value,
        "alpha": args.alpha,
        "eigenvalues": list(diag.eigenvalues),
        "log_base": base,
    }
    if args.divergence is not None:
        sigma = gio.state_from_json(_load_json(args.divergence))
        div = kl_divergence(rho, sigma, base=math.e)
        payload["divergence"] = "inf" if math.isinf(div) else div
        payload["divergence_log_base"] = "e"
    _emit(payload, args.format)
    return 0


def _cmd_gibbs(args) -> int:
    h = Hamiltonian.from_observable(
        gio.observable_from_json(_load_json(args.hamiltonian))
    )
    if args.beta is None and args.energy is None:
        raise SchemaError("one of --beta / --energy is required")
    beta = args.beta if args.beta is not None else beta_of_energy(h, args.energy)
    rho = gibbs_state(h, beta)
    payload = gio.state_to_json(rho)
    payload["beta"] = beta
    payload["log_base"] = "e"
    _emit(payload, args.format)
    return 0


def _cmd_landauer(args) -> int:
    system = make_quantum(args.sys_dim)
    env = make_quantum(args.env_dim)
    comp = compose(system, env)
    worst = {"residual": -1.0}
    trials = []
    for t in range(args.trials):
        rng = np.random.default_rng((args.seed, t))
        energies = rng.uniform(0.0, 1.0, env.total_dim)
        energies[0], energies[-1] = 0.0, 1.0
        h_e = Hamiltonian.from_energies(env, energies)
        from .sampling import random_state

        rho_s = random_state(system, rng)
        u = random_reversible(comp, rng)
        report = landauer_report(rho_s, h_e, args.beta, u, ThermoConfig())
        trials.append(report)
        if report["residual"] > worst["residual"]:
            worst = report
    payload = {
        "beta": args.beta,
        "trials": args.trials,
        "seed": args.seed,
        "max_residual": worst["residual"],
        "worst_trial": worst,
        "reports": trials if args.trials <= 10 else trials[:10],
        "log_base": "e",
    }
    _emit(payload, args.format)
    return 0


def _cmd_naimark(args) -> int:
    data = _load_json(args.input)
    try:
        system = gio.descriptor_from_json(data["system"])
        effects = [
            gio.effect_from_json({"system": data["system"], "blocks": [b]})
            for b in data["effects"]
        ]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed test payload: {exc}")
    ancilla, phi0, projections = naimark(effects)
    kraus = [p.kraus[0] for p in projections]
    orth = max(
        float(np.max(np.abs(ki @ kj - (ki if i == j else 0.0))))
        for i, ki in enumerate(kraus)
        for j, kj in enumerate(kraus)
    )
    payload = {
        "ancilla": gio.descriptor_to_json(ancilla),
        "ancilla_state": gio.pure_vector_to_json(phi0),
        "projections": [gio.channel_to_json(p) for p in projections],
        "orthogonality_residual": orth,
    }
    _emit(payload, args.format)
    return 0


def _cmd_distinguish(args) -> int:
    data = _load_json(args.input)
    try:
        states = [gio.state_from_json(s) for s in data["states"]]
        effects = [gio.effect_from_json(e) for e in data["effects"]]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed protocol payload: {exc}")
    test = distinguishability_protocol(states, effects)
    from .statespace import pair

    residual = max(
        abs(pair(e, rho) - (1.0 if i == j else 0.0))
        for i, e in enumerate(test)
        for j, rho in enumerate(states)
    )
    payload = {
        "test": [gio.effect_to_json(e) for e in test],
        "residual": residual,
    }
    _emit(payload, args.format)
    return 0


def _cmd_purify(args) -> int:
    rho = gio.state_from_json(_load_json(args.input))
    psi, partner = purify(rho)
    check = marginal(psi, "A")
    dev = max(
        float(np.max(np.abs(a - b))) if a.size else 0.0
        for a, b in zip(check.blocks, rho.blocks)
    )
    payload = gio.state_to_json(psi)
    payload["partner"] = gio.descriptor_to_json(partner)
    payload["marginal_residual"] = dev
    _emit(payload, args.format)
    return 0


def _cmd_verify(args) -> int:
    if args.suite is None and not args.all:
        raise SchemaError("pass --all or --suite NAME")
    names = list(SUITES) if args.all else [args.suite]
    if args.suite is not None and args.suite not in SUITES:
        raise UnknownSuite(f"unknown suite {args.suite!r}")
    theories = (
        [_theory_arg(args.theory)] if args.theory is not None else default_theories()
    )
    all_pass = True
    for name in names:
        spec = SUITES[name]
        applicable = [t for t in theories if spec.applies(t)]
        for theory in applicable:
            report = run_suite(name, theory, args.trials, args.seed, args.tol)
            all_pass &= report.passed
            if args.format == "pretty":
                flag = "PASS" if report.passed else "FAIL"
                sys.stdout.write(
                    f"{flag} {report.suite} [{report.theory}] "
                    f"max_residual={report.max_residual:.3e} tol={report.tolerance:.1e}\n"
                )
            else:
                _emit(report.to_json(), args.format)
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gptkit",
        description="Numerical toolkit for sharp sector theories",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagonalize", help="eigenvalues and eigenstates of a state")
    _add_common(p)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=_cmd_diagonalize)

    p = sub.add_parser("recompose", help="rebuild a state from a diagonalization")
    _add_common(p)
    p.set_defaults(fn=_cmd_recompose)

    p = sub.add_parser("schmidt", help="Schmidt decomposition of a pure bipartite state")
    _add_common(p)
    p.set_defaults(fn=_cmd_schmidt)

    p = sub.add_parser("entropy", help="entropies and divergence")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--base", type=float, default=2.0)
    p.add_argument("--divergence", metavar="OTHER", default=None)
    p.set_defaults(fn=_cmd_entropy)

    p = sub.add_parser("gibbs", help="Gibbs state of a Hamiltonian")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--energy", type=float, default=None)
    p.add_argument("--format", choices=["json", "pretty"], default="json")
    p.set_defaults(fn=_cmd_gibbs)

    p = sub.add_parser("landauer", help="randomized erasure-cost reports")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--env-dim", type=int, default=4)
    p.add_argument("--sys-dim", type=int, default=2)
    p.add_argument("--format", choices=["json", "pretty"], default="json")
    p.set_defaults(fn=_cmd_landauer)

    p = sub.add_parser("naimark", help="projective dilation of an observation-test")
    _add_common(p)
    p.set_defaults(fn=_cmd_naimark)

    p = sub.add_parser("distinguish", help="sequential distinguishability protocol")
    _add_common(p)
    p.set_defaults(fn=_cmd_distinguish)

    p = sub.add_parser("purify", help="purification of a state")
    _add_common(p)
    p.set_defaults(fn=_cmd_purify)

    p = sub.add_parser("verify", help="run theorem verification suites")
    p.add_argument("--all", action="store_true")
    p.add_argument("--suite", default=None)
    p.add_argument("--theory", default=None, help="preset name or descriptor JSON")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--format", choices=["json", "pretty"], default="json")
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GptError as exc:
        sys.stderr.write(f"error[{exc.code}]: {exc}\n")
        return 2
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"error[schema-error]: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
