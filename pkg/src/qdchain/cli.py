"""Batch front door: verification, optimisation, sweeps, diagram generation.

Subcommands (one per experiment family):

    basis check                  golden checks of the coupled bases
    gate list                    registry of shipped gates
    gate verify --name NAME      encoded-block verification of one gate
    sequence eval --file CSV     verify a sequence file against a target
    krotov run                   optimise a control field for a target
    krotov prune                 pulse-deletion shortening of a field
    noise sweep                  infidelity vs relative noise strength
    ehm diagram                  entanglement over a (U, eps1) grid
    ehm boundary                 analytic configuration boundaries
    dephasing sweep              Gamma_ST over x0 or beta
    merit                        merit figure from (J, Gamma) pairs

Exit codes: 0 success, 1 verification failure, 2 usage error.  All outputs
land in --out DIR (created if needed) together with a manifest; identical
configs and seeds give byte-identical artifacts.  Ranges are start:stop:count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import basis as basis_mod
from . import ehm, gates, io as qio, krotov, noise, phonon
from .spincore import load_sequence, save_sequence

USAGE_ERROR = 2
VERIFY_ERROR = 1


def _parse_range(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"range must be start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("range count must be >= 1")
    return [float(x) for x in np.linspace(start, stop, count)]


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _manifest(args, extra: dict | None = None) -> None:
    inputs = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "out") and v is not None}
    constants = {
        "c_la_m_per_s": 5290.0,
        "c_ta_m_per_s": 2480.0,
        "deformation_potential_ev": 8.6,
        "mass_density_kg_m3": 5.3e3,
        "e14_v_per_m": 1.38e9,
        "gamma0_hz": 1e8,
        "a_z_m": 3e-9,
    }
    if extra:
        inputs.update(extra)
    qio.write_manifest(args.out, args.command_path, inputs, constants)


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def cmd_basis_check(args) -> int:
    out = _outdir(args)
    rows = []
    ok = True
    builders = (("six", basis_mod.six_spin_basis),
                ("nine_half", lambda: basis_mod.nine_spin_sector_basis(basis_mod.HALF)),
                ("nine_three_half", lambda: basis_mod.nine_spin_sector_basis(3 * basis_mod.HALF)))
    for name, builder in builders:
        b = builder()
        defect = b.orthonormality_defect()
        rows.append((name, b.n_cols, defect))
        ok = ok and defect <= 1e-12
        with open(os.path.join(out, f"basis_{name}.csv"), "w", newline="") as fh:
            fh.write(basis_mod.basis_to_csv(b))
    expected = {"six": 64, "nine_half": 42, "nine_three_half": 48}
    for name, cols, _ in rows:
        ok = ok and expected[name] == cols
    qio.emit(qio.Table.of(["basis", "columns", "orthonormality_defect"], rows),
             "csv", os.path.join(out, "basis_check.csv"))
    _manifest(args)
    print("basis check:", "ok" if ok else "FAILED")
    return 0 if ok else VERIFY_ERROR


def cmd_gate_list(args) -> int:
    out = _outdir(args)
    with open(os.path.join(out, "gates.json"), "w", newline="") as fh:
        fh.write(gates.registry_to_json() + "\n")
    rows = []
    for name, g in sorted(gates.gate_registry().items()):
        rows.append((name, g.qubits,
                     g.sequence.pulse_count if g.sequence else 0,
                     g.sequence.step_count if g.sequence else 0))
    qio.emit(qio.Table.of(["name", "qubits", "pulses", "steps"], rows),
             "csv", os.path.join(out, "gate_list.csv"))
    _manifest(args)
    for r in rows:
        print(*r)
    return 0


def cmd_gate_verify(args) -> int:
    reg = gates.gate_registry()
    if args.name not in reg:
        print(f"unknown gate {args.name!r}", file=sys.stderr)
        return USAGE_ERROR
    g = reg[args.name]
    if g.sequence is None:
        print(f"gate {args.name!r} is a bare target with no sequence", file=sys.stderr)
        return USAGE_ERROR
    out = _outdir(args)
    if not g.block_encodable:
        dist = gates.verify_permutation_gate(g.sequence, g.target, g.qubits)
        payload = {"name": g.name, "permutation_distance": qio.fmt_float(dist),
                   "pass": bool(dist == 0.0)}
        with open(os.path.join(out, f"verify_{g.name}.json"), "w", newline="") as fh:
            fh.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
        _manifest(args)
        print(f"{g.name}: product-space permutation check "
              f"{'ok' if payload['pass'] else 'FAILED'}")
        return 0 if payload["pass"] else VERIFY_ERROR
    rep = gates.verify_gate(g.sequence, g.target, g.qubits)
    payload = {
        "name": g.name,
        "block_infidelities": [qio.fmt_float(x) for x in rep.block_infidelities],
        "block_phases_deg": [qio.fmt_float(float(np.degrees(np.angle(p))))
                             for p in rep.block_phases],
        "leakage_norm": qio.fmt_float(rep.leakage_norm),
        "pulse_count": rep.pulse_count,
        "step_count": rep.step_count,
        "tolerance": g.tolerance,
        "pass": bool(rep.max_infidelity <= g.tolerance),
    }
    with open(os.path.join(out, f"verify_{g.name}.json"), "w", newline="") as fh:
        fh.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    _manifest(args)
    print(f"{g.name}: max block infidelity {rep.max_infidelity:.3e} "
          f"(tolerance {g.tolerance:g}) leakage {rep.leakage_norm:.3e}")
    return 0 if payload["pass"] else VERIFY_ERROR


def cmd_sequence_eval(args) -> int:
    out = _outdir(args)
    seq = load_sequence(args.file, n_spins=9)
    target = gates.logical_target(args.target)
    rep = gates.verify_gate(seq, target, args.qubits)
    rows = [(n, inf, float(np.angle(ph)))
            for n, (inf, ph) in enumerate(zip(rep.block_infidelities, rep.block_phases))]
    qio.emit(qio.Table.of(["block", "infidelity", "phase_rad"], rows),
             "csv", os.path.join(out, "sequence_eval.csv"))
    _manifest(args)
    print("max infidelity:", rep.max_infidelity, "leakage:", rep.leakage_norm)
    return 0 if rep.max_infidelity <= args.tol else VERIFY_ERROR


def cmd_krotov_run(args) -> int:
    out = _outdir(args)
    target = gates.logical_target(args.target)
    ansatz = krotov.brickwork_ansatz(args.steps)
    if args.init == "raw55":
        field = krotov.field_from_sequence(gates.toffoli_raw55(), ansatz)
    elif args.init == "zero":
        field = krotov.ControlField.zeros(ansatz)
    else:
        field = krotov.ControlField.random(ansatz, seed=args.seed)
    cfg = krotov.OptimizerConfig(
        lambda_a=args.lambda_a, max_iterations=args.iterations,
        infidelity_threshold=args.threshold, seed=args.seed)
    res = krotov.krotov_optimize(field, target, cfg)
    save_sequence(res.field.to_sequence(), os.path.join(out, "krotov_field.csv"))
    payload = {
        "config": {
            "lambda_a": args.lambda_a, "max_iterations": args.iterations,
            "threshold": args.threshold, "seed": args.seed,
            "steps": args.steps, "init": args.init, "target": args.target,
        },
        "trace": [qio.fmt_float(x) for x in res.trace],
        "converged": res.converged,
        "lambda_a_final": res.lambda_a_final,
        "states_mode": res.states_mode,
        "nonzero_pulses": res.field.nonzero_pulse_count(),
    }
    with open(os.path.join(out, "krotov_run.json"), "w", newline="") as fh:
        fh.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    _manifest(args)
    # non-convergence is a reported status, not a process failure
    print("converged:", res.converged, "final J:", res.trace[-1],
          "iterations:", len(res.trace) - 1)
    return 0


def cmd_krotov_prune(args) -> int:
    out = _outdir(args)
    target = gates.logical_target(args.target)
    ansatz = krotov.brickwork_ansatz(args.steps)
    if args.init == "raw55":
        field = krotov.field_from_sequence(gates.toffoli_raw55(), ansatz)
    elif args.file:
        field = krotov.field_from_sequence(load_sequence(args.file, 9), ansatz)
    else:
        print("krotov prune needs --init raw55 or --file", file=sys.stderr)
        return USAGE_ERROR
    cfg = krotov.OptimizerConfig(
        lambda_a=args.lambda_a, max_iterations=args.iterations,
        infidelity_threshold=args.threshold, seed=args.seed,
        verify_all_blocks=False)
    pruned = krotov.prune_sequence(field, target, cfg)
    save_sequence(pruned.to_sequence(), os.path.join(out, "pruned_field.csv"))
    payload = {
        "nonzero_pulses_before": field.nonzero_pulse_count(),
        "nonzero_pulses_after": pruned.nonzero_pulse_count(),
        "final_infidelity": qio.fmt_float(
            krotov.infidelity(pruned.to_sequence(), target)),
    }
    with open(os.path.join(out, "krotov_prune.json"), "w", newline="") as fh:
        fh.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    _manifest(args)
    print("pulses:", payload["nonzero_pulses_before"], "->",
          payload["nonzero_pulses_after"])
    return 0


def cmd_noise_sweep(args) -> int:
    out = _outdir(args)
    reg = gates.gate_registry()
    rows = []
    alphas = _parse_range(args.alpha)
    for name in args.sequences.split(","):
        if name not in reg or reg[name].sequence is None:
            print(f"unknown sequence {name!r}", file=sys.stderr)
            return USAGE_ERROR
        g = reg[name]
        for kind in args.models.split(","):
            curve = noise.noise_sweep(g.sequence, g.target, alphas, kind, name)
            for k, a in enumerate(curve.alphas):
                rows.append((a, kind, name, curve.infidelities[k],
                             curve.block2_infidelities[k],
                             curve.block3_infidelities[k]))
    qio.emit(qio.Table.of(
        ["alpha", "model", "sequence_name", "infidelity",
         "infidelity_block2", "infidelity_block3"], rows),
        "csv", os.path.join(out, "noise_sweep.csv"))
    _manifest(args)
    print(f"wrote {len(rows)} rows")
    return 0


EHM_CONFIG_SCHEMA = {
    "L": (True, int, None),
    "N": (True, int, None),
    "Sz": (False, float, None),
    "alpha": (True, float, None),
    "U": (True, (float, str), None),
    "epsilon": (False, list, None),
    "basis_mode": (False, str, "seven"),
}


def cmd_ehm_diagram(args) -> int:
    out = _outdir(args)
    basis_mode = "seven"
    if args.config:
        cfg = qio.load_config(args.config, EHM_CONFIG_SCHEMA)
        args.L, args.N, args.alpha = cfg["L"], cfg["N"], cfg["alpha"]
        args.U = str(cfg["U"])
        if cfg["Sz"] is not None:
            args.Sz = cfg["Sz"]
        if cfg["epsilon"]:
            args.eps = str(cfg["epsilon"][0])
        basis_mode = cfg["basis_mode"]
    us = _parse_range(args.U)
    eps = _parse_range(args.eps)
    obs = args.observables.split(",")
    rows = ehm.entanglement_diagram(args.L, args.N, args.alpha, us, eps, obs,
                                    Sz=args.Sz, basis_mode=basis_mode)
    qio.emit(qio.Table.of(["U", "epsilon1", "observable", "value"], rows),
             "csv", os.path.join(out, "ehm_diagram.csv"))
    if args.dump_configurations:
        crows = []
        for u in us:
            for e1 in eps:
                params = ehm.derived_params(
                    float(u), args.alpha,
                    epsilon=[float(e1)] + [0.0] * (args.L - 1))
                gs = ehm.ground_state(ehm.build_hamiltonian(
                    params, args.L, args.N, args.Sz, ehm.site_basis(basis_mode)))
                table = ehm.configuration_probabilities(gs, coarse=True)
                for pat, prob in sorted(table.items()):
                    if prob >= 1e-9:
                        crows.append(("".join(map(str, pat)), prob)
                                     if len(us) * len(eps) == 1 else
                                     (u, e1, "".join(map(str, pat)), prob))
        cols = ["pattern", "probability"] if len(us) * len(eps) == 1 else \
            ["U", "epsilon1", "pattern", "probability"]
        qio.emit(qio.Table.of(cols, crows), "csv",
                 os.path.join(out, "ehm_configurations.csv"))
    _manifest(args)
    print(f"wrote {len(rows)} rows")
    return 0


def cmd_ehm_boundary(args) -> int:
    out = _outdir(args)
    params = ehm.derived_params(args.U, args.alpha)
    rows = []
    for filling in ("N=L", "N=L+2"):
        for name, val in sorted(ehm.boundary_table(params, filling).items()):
            rows.append((filling, name, val))
    qio.emit(qio.Table.of(["filling", "boundary", "epsilon1"], rows),
             "csv", os.path.join(out, "ehm_boundary.csv"))
    _manifest(args)
    for r in rows:
        print(*r)
    return 0


PHONON_ENV_SCHEMA = {
    "deformation_potential_ev": (False, float, 8.6),
    "mass_density": (False, float, 5.3e3),
    "e14": (False, float, 1.38e9),
    "gamma0": (False, float, 1e8),
    "n_exponent": (False, int, 2),
    "c_la": (False, float, 5290.0),
    "c_ta": (False, float, 2480.0),
}


def cmd_dephasing_sweep(args) -> int:
    out = _outdir(args)
    if args.config:
        cfg = qio.load_config(args.config, PHONON_ENV_SCHEMA)
        env = phonon.PhononEnv(
            deformation_potential=cfg["deformation_potential_ev"] * phonon.EV,
            mass_density=cfg["mass_density"], e14=cfg["e14"],
            gamma0=cfg["gamma0"], n_exponent=cfg["n_exponent"],
            c_la=cfg["c_la"], c_ta=cfg["c_ta"])
    else:
        env = phonon.PhononEnv(n_exponent=args.n_exponent)
    ll = phonon.confinement_length(args.hw_left)
    lr = phonon.confinement_length(args.hw_right)
    rows = []
    configs = [tuple(int(x) for x in c.split("-")) for c in args.configs.split(",")]
    betas = _parse_range(args.beta)
    x0s = _parse_range(args.x0_nm)
    for label in configs:
        cfg = phonon.electron_config(label)
        for x0 in x0s:
            geom = phonon.DotGeometry(x0 * 1e-9, ll, lr)
            for beta in betas:
                regime = args.regime if beta > 0 else "unbiased"
                spec = phonon.QubitStateSpec(cfg, regime, beta)
                gamma = phonon.dephasing_rate(spec, geom, env,
                                              rel_tol=args.rel_tol,
                                              base_nodes=args.nodes)
                bnorm = beta / np.sqrt(1.0 + beta * beta)
                rows.append(("%d-%d" % label, regime, bnorm, x0, gamma))
    qio.emit(qio.Table.of(
        ["config", "regime", "beta_over_sqrt", "x0_nm", "gamma_hz"], rows),
        "csv", os.path.join(out, "dephasing_sweep.csv"))
    _manifest(args)
    print(f"wrote {len(rows)} rows")
    return 0


def cmd_merit(args) -> int:
    out = _outdir(args)
    rows = []
    for pair in args.pairs.split(","):
        j_uev, gamma = (float(x) for x in pair.split("/"))
        m = phonon.merit(j_uev * 1e-6 * phonon.EV, gamma)
        rows.append((j_uev, gamma, m))
    qio.emit(qio.Table.of(["J_ueV", "gamma_hz", "merit"], rows),
             "csv", os.path.join(out, "merit.csv"))
    _manifest(args)
    for r in rows:
        print(*r)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdchain", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="group")

    def common(sp):
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--config", default=None, help="JSON config file")

    g_basis = sub.add_parser("basis").add_subparsers(dest="action")
    sp = g_basis.add_parser("check"); common(sp); sp.set_defaults(func=cmd_basis_check)

    g_gate = sub.add_parser("gate").add_subparsers(dest="action")
    sp = g_gate.add_parser("list"); common(sp); sp.set_defaults(func=cmd_gate_list)
    sp = g_gate.add_parser("verify"); common(sp)
    sp.add_argument("--name", required=True)
    sp.set_defaults(func=cmd_gate_verify)

    g_seq = sub.add_parser("sequence").add_subparsers(dest="action")
    sp = g_seq.add_parser("eval"); common(sp)
    sp.add_argument("--file", required=True)
    sp.add_argument("--target", default="CCNOT")
    sp.add_argument("--qubits", default="ABC")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.set_defaults(func=cmd_sequence_eval)

    g_kr = sub.add_parser("krotov").add_subparsers(dest="action")
    sp = g_kr.add_parser("run"); common(sp)
    sp.add_argument("--target", default="CCNOT")
    sp.add_argument("--steps", type=int, default=55)
    sp.add_argument("--init", default="raw55", choices=["raw55", "zero", "random"])
    sp.add_argument("--iterations", type=int, default=200)
    sp.add_argument("--threshold", type=float, default=1e-8)
    sp.add_argument("--lambda-a", dest="lambda_a", type=float, default=1.0)
    sp.set_defaults(func=cmd_krotov_run)
    sp = g_kr.add_parser("prune"); common(sp)
    sp.add_argument("--target", default="CCNOT")
    sp.add_argument("--steps", type=int, default=55)
    sp.add_argument("--init", default="raw55")
    sp.add_argument("--file", default=None)
    sp.add_argument("--iterations", type=int, default=120)
    sp.add_argument("--threshold", type=float, default=1e-6)
    sp.add_argument("--lambda-a", dest="lambda_a", type=float, default=1.0)
    sp.set_defaults(func=cmd_krotov_prune)

    g_noise = sub.add_parser("noise").add_subparsers(dest="action")
    sp = g_noise.add_parser("sweep"); common(sp)
    sp.add_argument("--sequences", default="CCNOT_92,CCNOT_decomp")
    sp.add_argument("--models", default="charge,crosstalk")
    sp.add_argument("--alpha", default="1e-4:1e-1:4",
                    help="range start:stop:count or single value")
    sp.set_defaults(func=cmd_noise_sweep)

    g_ehm = sub.add_parser("ehm").add_subparsers(dest="action")
    sp = g_ehm.add_parser("diagram"); common(sp)
    sp.add_argument("--L", type=int, default=4)
    sp.add_argument("--N", type=int, default=4)
    sp.add_argument("--alpha", type=float, default=0.2)
    sp.add_argument("--U", default="0:40:81")
    sp.add_argument("--eps", default="-30:30:121")
    sp.add_argument("--Sz", type=float, default=None)
    sp.add_argument("--observables", default="E1")
    sp.add_argument("--dump-configurations", dest="dump_configurations",
                    action="store_true")
    sp.set_defaults(func=cmd_ehm_diagram)
    sp = g_ehm.add_parser("boundary"); common(sp)
    sp.add_argument("--U", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=0.2)
    sp.set_defaults(func=cmd_ehm_boundary)

    g_dep = sub.add_parser("dephasing").add_subparsers(dest="action")
    sp = g_dep.add_parser("sweep"); common(sp)
    sp.add_argument("--configs", default="1-1,1-3,1-7")
    sp.add_argument("--x0-nm", dest="x0_nm", default="70")
    sp.add_argument("--beta", default="0")
    sp.add_argument("--regime", default="biased_02N")
    sp.add_argument("--hw-left", dest="hw_left", type=float, default=2.838)
    sp.add_argument("--hw-right", dest="hw_right", type=float, default=1.419)
    sp.add_argument("--n-exponent", dest="n_exponent", type=int, default=2)
    sp.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-3)
    sp.add_argument("--nodes", type=int, default=40)
    sp.set_defaults(func=cmd_dephasing_sweep)

    sp = sub.add_parser("merit")
    common(sp)
    sp.add_argument("--pairs", required=True,
                    help="comma list of J_ueV/gamma_hz pairs")
    sp.set_defaults(func=cmd_merit)
    return p


def _merge_negative_values(argv):
    """Join '--flag -3:3:7' into '--flag=-3:3:7' so argparse accepts it."""
    out = []
    k = 0
    while k < len(argv):
        tok = argv[k]
        nxt = argv[k + 1] if k + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt
                and nxt.startswith("-") and len(nxt) > 1 and nxt[1].isdigit()):
            out.append(f"{tok}={nxt}")
            k += 2
        else:
            out.append(tok)
            k += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_negative_values(list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    if not hasattr(args, "func"):
        parser.print_help()
        return USAGE_ERROR
    args.command_path = " ".join((argv or sys.argv[1:])[:2])
    try:
        return args.func(args)
    except (ValueError, KeyError, qio.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
