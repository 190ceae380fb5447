"""Command-line front end: limbsys <verb> with stable JSON/CSV formats.

Exit codes: 0 success, 1 usage or input error, 2 infeasible transportation
instance, 3 non-extremal coupling (or cyclic support where acyclicity is
required), 4 infeasible reconstruction.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .circle import DemoConfig, run_demo, support_rows
from .errors import (
    CyclicSupportError,
    InfeasibleError,
    LimbsysError,
)
from .extremality import is_extremal, support_graph
from .io import (
    coupling_payload,
    duals_payload,
    load_coupling,
    load_problem,
    load_system,
    system_payload,
    witness_payload,
    write_json,
)
from .limbs import decompose, reconstruct
from .measures import ToleranceConfig
from .transport import solve


def _tolerances(args) -> ToleranceConfig:
    return ToleranceConfig(eps_mass=args.eps_mass, eps_cost=args.eps_cost)


def _cmd_solve(args) -> int:
    mu, nu, cost = load_problem(args.problem, args.rational)
    if cost is None:
        print("problem file has no cost matrix", file=sys.stderr)
        return 1
    report = solve(mu, nu, cost, _tolerances(args))
    if args.out:
        write_json(args.out, coupling_payload(report.coupling))
    if args.duals:
        write_json(args.duals, duals_payload(report.potentials, report.primal_value))
    print(f"optimum {float(report.primal_value):.17g} in {report.iterations} pivots")
    return 0


def _cmd_check_extremal(args) -> int:
    gamma = load_coupling(args.coupling, args.rational)
    certificate = is_extremal(gamma, _tolerances(args))
    print(certificate.verdict)
    if certificate.extremal:
        return 0
    if args.witness:
        write_json(args.witness, witness_payload(certificate.cycle, *certificate.split))
    return 3


def _cmd_witness(args) -> int:
    gamma = load_coupling(args.coupling, args.rational)
    certificate = is_extremal(gamma, _tolerances(args))
    print(certificate.verdict)
    if certificate.extremal:
        return 0
    write_json(args.out, witness_payload(certificate.cycle, *certificate.split))
    return 3


def _cmd_decompose(args) -> int:
    gamma = load_coupling(args.coupling, args.rational)
    system = decompose(support_graph(gamma, _tolerances(args)))
    write_json(args.out, system_payload(system))
    print(f"{len(system.limbs)} limbs")
    return 0


def _cmd_reconstruct(args) -> int:
    system = load_system(args.system, args.rational)
    mu, nu, _ = load_problem(args.problem, args.rational)
    report = reconstruct(system, mu, nu, _tolerances(args))
    if not report.feasible:
        print(f"infeasible: {report.message}", file=sys.stderr)
        return 4
    write_json(args.out, coupling_payload(report.coupling))
    print(f"coupling with {len(report.coupling.entries)} cells")
    return 0


def _cmd_demo_circle(args) -> int:
    cfg = DemoConfig(
        n=args.n,
        mu_center=args.mu_center,
        mu_kappa=args.mu_kappa,
        nu_center=args.nu_center,
        nu_kappa=args.nu_kappa,
        tol=_tolerances(args),
    )
    report = run_demo(cfg)
    maps_payload = None
    if report.two_limb is not None:
        f1, f2 = report.two_limb
        maps_payload = {"f1": list(f1), "f2": list(f2)}
    if args.out:
        write_json(
            args.out,
            {
                "n": cfg.n,
                "mu_center": cfg.mu_center,
                "mu_kappa": cfg.mu_kappa,
                "nu_center": cfg.nu_center,
                "nu_kappa": cfg.nu_kappa,
                "value": report.solve_report.primal_value,
                "iterations": report.solve_report.iterations,
                "verdict": report.certificate.verdict,
                "two_limb": maps_payload,
                "cross_mass": report.cross_mass,
                "coupling": coupling_payload(report.solve_report.coupling),
            },
        )
    if args.plot:
        with open(args.plot, "w", encoding="utf-8") as fh:
            fh.write("theta,phi,mass,limb_kind\n")
            for theta, phi, mass, kind in support_rows(report):
                fh.write(f"{theta:.17g},{phi:.17g},{float(mass):.17g},{kind}\n")
    split = "two-limb split found" if report.two_limb is not None else "no two-limb split"
    cross = "none" if report.cross_mass is None else f"{float(report.cross_mass):.17g}"
    print(
        f"value {float(report.solve_report.primal_value):.17g}, "
        f"{report.certificate.verdict}, {split}, cross mass {cross}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps-mass", type=float, default=1e-12, help="mass tolerance")
    common.add_argument("--eps-cost", type=float, default=1e-9, help="cost tolerance")
    common.add_argument(
        "--rational", action="store_true", help="parse input numbers as exact fractions"
    )

    parser = argparse.ArgumentParser(
        prog="limbsys",
        description="Finite transportation problems, extremal couplings, and limb systems.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("solve", parents=[common], help="minimize transport cost")
    p.add_argument("problem")
    p.add_argument("--out", help="write the optimal coupling here")
    p.add_argument("--duals", help="write the dual potentials here")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("check-extremal", parents=[common], help="decide extremality")
    p.add_argument("coupling")
    p.add_argument("--witness", help="write cycle and convex split when non-extremal")
    p.set_defaults(fn=_cmd_check_extremal)

    p = sub.add_parser("witness", parents=[common], help="write a non-extremality witness")
    p.add_argument("coupling")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_witness)

    p = sub.add_parser("decompose", parents=[common], help="split an acyclic support into limbs")
    p.add_argument("coupling")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("reconstruct", parents=[common], help="rebuild the coupling of a system")
    p.add_argument("system")
    p.add_argument("problem")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_reconstruct)

    p = sub.add_parser("demo-circle", parents=[common], help="run the circular town example")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--mu-center", type=float, default=DemoConfig.mu_center)
    p.add_argument("--mu-kappa", type=float, default=DemoConfig.mu_kappa)
    p.add_argument("--nu-center", type=float, default=DemoConfig.nu_center)
    p.add_argument("--nu-kappa", type=float, default=DemoConfig.nu_kappa)
    p.add_argument("--out", help="write the demo report here")
    p.add_argument("--plot", help="write plot-ready support rows here")
    p.set_defaults(fn=_cmd_demo_circle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except json.JSONDecodeError as exc:
        print(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return 1
    except CyclicSupportError as exc:
        print(f"cyclic support: {exc}", file=sys.stderr)
        return 3
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (LimbsysError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
