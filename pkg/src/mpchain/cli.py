"""Command-line interface: ``mpchain <subcommand> [flags]``.

Every subcommand emits the same table (CSV header
``sigma,mode,g,N,r,quantity,value,error``) or its JSON mirror.  Exit codes:
0 success, 1 validation error, 2 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import analysis
from .analysis import Row, report, write_output
from .entanglement import ScanCapReached, entanglement_range, max_entangled_system_size
from .hamiltonian import HamiltonianWeights, assemble_chain, coupling_constants, spin_form_local
from .model import ConsistencyError, ModelParams, build_site_matrices, check_symmetries, transfer_matrix

EXIT_OK, EXIT_VALIDATION, EXIT_INTERNAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _sigma(text: str) -> int:
    v = int(text)
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("sigma must be 1 or -1")
    return v


def _base(text: str) -> str:
    if text not in ("2", "e"):
        raise argparse.ArgumentTypeError("log base must be 2 or e")
    return text


def _common(p: argparse.ArgumentParser, n=False, r=False, mode=False):
    p.add_argument("--g", type=float, default=0.1)
    p.add_argument("--sigma", type=_sigma, default=1)
    if n:
        p.add_argument("--n", type=int, default=20)
    if r:
        p.add_argument("--r", type=int, default=2)
    if mode:
        p.add_argument("--mode", choices=("finite", "thermo"), default="finite")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="write to PATH instead of stdout")
    p.add_argument("--log-base", type=_base, default="2")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mpchain", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _common(sub.add_parser("spectrum", help="transfer-matrix eigenvalues and symmetry residuals"))
    _common(sub.add_parser("entropy", help="one-site entropy"), n=True, mode=True)
    _common(sub.add_parser("negativity", help="two-site negativity"), n=True, r=True, mode=True)
    p = sub.add_parser("correlator", help="two-point functions")
    _common(p, n=True, r=True, mode=True)
    p.add_argument("--kind", choices=("zz", "xy"), default="zz")
    _common(sub.add_parser("range", help="thermodynamic entanglement range"))
    p = sub.add_parser("nmax", help="largest ring size with entangled sites 1 and r")
    _common(p, r=True)
    p.add_argument("--cap", type=int, default=500)

    p = sub.add_parser("sweep", help="parameter sweep from a preset or a JSON spec")
    _common(p)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--preset", choices=("fig1", "fig2", "fig3", "fig4", "fig5", "fig5odd", "fig6"))
    grp.add_argument("--spec", help="JSON file with one sweep spec or a list of them")

    p = sub.add_parser("scaling", help="peak scaling laws and data collapse")
    _common(p)
    p.add_argument("--n-list", type=int, nargs="+", default=list(analysis.DEFAULT_SCALING_NS))

    p = sub.add_parser("hamiltonian", help="couplings J1..J6 and parent-Hamiltonian checks")
    _common(p, n=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--check", action="store_true", help="verify spin form and zero-energy ground state")

    p = sub.add_parser("oracle-check", help="transfer-matrix vs dense-state equivalence table")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    return ap


def _N(args):
    return math.inf if getattr(args, "mode", "finite") == "thermo" else args.n


def cmd_spectrum(args):
    params = ModelParams(args.g, args.sigma)
    mats = build_site_matrices(params)
    eig = np.sort(transfer_matrix(mats).eigenvalues().real)
    rows = [Row(args.sigma, "thermo", args.g, None, None, f"lambda{k + 1}", float(v)) for k, v in enumerate(eig[::-1])]
    rep = check_symmetries(mats, params)
    for name in ("z_rotation", "spin_flip", "parity"):
        rows.append(Row(args.sigma, "thermo", args.g, None, None, f"residual_{name}", getattr(rep, name)))
    if not rep.ok:
        raise ConsistencyError(f"symmetry relations fail: {rep.failures()}")
    return rows


def _single(args, quantity):
    N = _N(args)
    r = getattr(args, "r", None)
    value = analysis.evaluate(quantity, ModelParams(args.g, args.sigma), N, r, args.log_base)
    return [Row(args.sigma, args.mode, args.g, N, r, quantity, float(value))]


def cmd_range(args):
    rng = entanglement_range(ModelParams(args.g, args.sigma))
    return [
        Row(args.sigma, "thermo", args.g, math.inf, None, "range_exact", rng.exact),
        Row(args.sigma, "thermo", args.g, math.inf, None, "range_approx", rng.approx),
    ]


def cmd_nmax(args):
    try:
        nmax = max_entangled_system_size(ModelParams(args.g, args.sigma), args.r, cap=args.cap)
        return [Row(args.sigma, "finite", args.g, nmax, args.r, "nmax", nmax, "" if nmax else "never entangled")]
    except ScanCapReached as exc:
        return [Row(args.sigma, "finite", args.g, None, args.r, "nmax", None, f">= {exc.cap}")]


def cmd_sweep(args):
    if args.preset == "fig6":
        return analysis.scaling_rows(analysis.scaling_analysis())
    if args.preset:
        specs = analysis.preset(args.preset)
    else:
        try:
            with open(args.spec) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ValueError(f"cannot read spec {args.spec}: {exc}") from exc
        specs = [analysis.SweepSpec.from_dict(d) for d in (doc if isinstance(doc, list) else [doc])]
    rows = []
    for spec in specs:
        rows.extend(analysis.run_sweep(spec))
    return rows


def cmd_scaling(args):
    fit = analysis.scaling_analysis(args.n_list)
    if not all(p.certified for p in fit.peaks):
        raise ConsistencyError("a peak failed its local-maximum certificate")
    return analysis.scaling_rows(fit)


def cmd_hamiltonian(args):
    params = ModelParams(args.g, args.sigma)
    weights = HamiltonianWeights(args.a, args.b, args.c)
    J = coupling_constants(params, weights)
    rows = [Row(args.sigma, "finite", args.g, None, None, f"J{k + 1}", v) for k, v in enumerate(J.as_tuple())]
    if args.check:
        from .oracle import dense_energy

        form = spin_form_local(params, weights)
        rows.append(Row(args.sigma, "finite", args.g, None, None, "spin_form_shift", form.shift))
        res = dense_energy(params, weights, args.n)
        rows.append(Row(args.sigma, "finite", args.g, args.n, None, "ground_state_residual", res))
        rng = np.random.default_rng(0)
        V = rng.standard_normal((3**args.n, 20))
        H = assemble_chain(params, weights, args.n)
        min_expect = float(np.min(np.einsum("ik,ik->k", V, H.matmat(V)) / np.einsum("ik,ik->k", V, V)))
        rows.append(Row(args.sigma, "finite", args.g, args.n, None, "min_random_expectation", min_expect))
        if res > 1e-10 or min_expect < -1e-10:
            raise ConsistencyError("parent Hamiltonian check failed")
    return rows


ORACLE_GS = (0.0, 0.1, -0.1, 0.25, -0.25, 0.5, -0.5, 1.0)


def oracle_table(n_max: int = 8, tol: float = 1e-12, n_min: int = 3) -> list[Row]:
    """Max deviations between contraction and dense routes per (sigma, g, N)."""
    from .entanglement import negativity
    from .observables import one_site_rdm, two_site_rdm
    from .oracle import dense_negativity, dense_rdm, dense_state

    rows = []
    for s in (1, -1):
        for g in ORACLE_GS:
            params = ModelParams(g, s)
            for N in range(n_min, n_max + 1):
                st = dense_state(params, N)
                d1 = np.abs(dense_rdm(st, [1]) - one_site_rdm(params, N).rho1).max()
                d2 = dn = 0.0
                for r in range(2, N + 1):
                    R = two_site_rdm(params, r, N)
                    d2 = max(d2, np.abs(dense_rdm(st, [1, r]) - R.rho2).max())
                    dn = max(dn, abs(dense_negativity(st, 1, r).value - negativity(R).value))
                for q, v in (("one_site_rdm", d1), ("two_site_rdm", d2), ("negativity", dn)):
                    rows.append(Row(s, "finite", g, N, None, q, float(v), "" if v <= tol else "FAIL"))
    return rows


def cmd_oracle_check(args):
    rows = oracle_table(args.n_max, args.tol)
    bad = [r for r in rows if r.error]
    print(f"oracle-check: {len(rows) - len(bad)}/{len(rows)} checks pass", file=sys.stderr)
    return rows, bool(bad)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "entropy": lambda a: _single(a, "entropy"),
    "negativity": lambda a: _single(a, "negativity"),
    "correlator": lambda a: _single(a, "correlator-zz" if a.kind == "zz" else "correlator-xy"),
    "range": cmd_range,
    "nmax": cmd_nmax,
    "sweep": cmd_sweep,
    "scaling": cmd_scaling,
    "hamiltonian": cmd_hamiltonian,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    failed = False
    try:
        if args.command == "oracle-check":
            rows, failed = cmd_oracle_check(args)
        else:
            rows = COMMANDS[args.command](args)
        data = report(rows, args.format)
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except AssertionError as exc:
        print(f"internal assertion failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.out:
        try:
            write_output(data, args.out)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
    else:
        sys.stdout.write(data.decode())
    return EXIT_INTERNAL if failed else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
