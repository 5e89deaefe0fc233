"""Command-line front end.

    cvstab compile circuit.cv
    cvstab run circuit.cv --strong
    cvstab run circuit.cv --shots 10000 --seed 7 --report json
    cvstab verify circuit.cv
    cvstab wigner --code gkp --d 2 --j 0 --Delta 0.2 --csv w.csv

Exit codes: 0 success, 2 parse error, 3 circuit rejected (outside the
recognised Clifford set), 4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import pipeline
from . import wigner as wg
from .dsl import parse_file
from .errors import (
    AliasingError,
    GateNotAdmitted,
    MethodTwoInputViolation,
    NonCliffordGate,
    ParseError,
    SqueezingInsufficient,
    TruncationError,
)
from .oracles.grid import DEFAULT_DELTA

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_REJECT = 3
EXIT_MISMATCH = 4


def _emit(report, fmt, out):
    out.write(pipeline.to_json(report) if fmt == "json" else pipeline.to_text(report))


def _add_common(p):
    p.add_argument("circuit", help="circuit file")
    p.add_argument("--method", choices=("one", "two"), help="RSB embedding method")
    p.add_argument("--report", choices=("json", "text"), default="text")


def _add_squeezing(p):
    p.add_argument("--Delta", type=float, default=DEFAULT_DELTA, help="GKP peak width for the grid oracle")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="GKP envelope width for the grid oracle")
    p.add_argument("--tol", type=float, default=None, help="override the CV oracle tolerance")


def build_parser():
    ap = argparse.ArgumentParser(prog="cvstab", description="Stabilizer simulation of GKP and rotation-symmetric bosonic circuits")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="show the embedding plan and tableau program")
    _add_common(p)

    p = sub.add_parser("run", help="simulate a circuit")
    _add_common(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strong", action="store_true", help="exact outcome distribution (default)")
    mode.add_argument("--shots", type=int, help="sample this many shots")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-postselection", action="store_true", help="sample teleported-Fourier failures and drop those shots")
    p.add_argument("--dump-state", action="store_true", help="include the pre-measurement tableau")
    p.add_argument("--verify", action="store_true", help="attach oracle comparisons")
    _add_squeezing(p)

    p = sub.add_parser("verify", help="compare the tableau against the dense and CV oracles")
    _add_common(p)
    _add_squeezing(p)

    p = sub.add_parser("wigner", help="Wigner function and negativity of a codeword")
    p.add_argument("--code", choices=("gkp", "cat", "vacuum"), default="gkp")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--Delta", type=float, default=0.2)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--alpha", type=float, default=2.0, help="coherent amplitude for cat codewords")
    p.add_argument("--M", type=int, default=1, help="rotation order for cat codewords")
    p.add_argument("--csv", help="write the W grid here")
    p.add_argument("--stride", type=int, default=1, help="CSV decimation")
    p.add_argument("--json", help="write the negativity report here (default stdout)")
    p.add_argument("--plot", help="write a PNG heat map here (needs matplotlib)")
    return ap


def _wigner(args, out):
    if args.code == "gkp":
        q, psi = wg.gkp_codeword_wavefunction(args.d, args.j, args.Delta, args.delta)
        params = {"d": args.d, "j": args.j, "Delta": args.Delta, "delta": args.delta or args.Delta}
    elif args.code == "cat":
        q, psi = wg.cat_codeword_wavefunction(args.alpha, args.d, args.M, args.j)
        params = {"d": args.d, "j": args.j, "alpha": args.alpha, "M": args.M}
    else:
        q = wg.uniform_grid(8, 0.05)
        psi = wg.vacuum_wavefunction(q)
        params = {}
    g = wg.wigner_of_wavefunction(psi, q)
    rep = {"schema": pipeline.SCHEMA, "code": args.code, "params": params, "negativity": wg.negativity(g).as_dict()}
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(wg.to_csv(g, args.stride))
    if args.plot:
        plot_wigner(g, args.plot)
    text = json.dumps(rep, sort_keys=True, indent=2) + "\n"
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def plot_wigner(g, path):
    """Plotting hook: static heat map of W(q, p)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    lim = float(abs(g.W).max())
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.pcolormesh(g.q, g.p, g.W.T, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="auto")
    ax.set_xlabel("q")
    ax.set_ylabel("p")
    fig.colorbar(im, ax=ax, label="W")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        if args.command == "wigner":
            return _wigner(args, out)
        circuit = parse_file(args.circuit)
        if args.command == "compile":
            c = pipeline.compile_circuit(circuit, args.method)
            if args.report == "json":
                rep = {"schema": pipeline.SCHEMA, "code": pipeline.code_block(circuit), "plan": c.plan.as_dict(),
                       "program": str(c.program).splitlines(), "keys": c.keys}
                out.write(pipeline.to_json(rep))
            else:
                out.write("plan: " + ", ".join(f"{k}={v}" for k, v in c.plan.as_dict().items()) + "\n")
                out.write(str(c.program).rstrip("\n") + "\n")
            return EXIT_OK
        kw = dict(Delta=args.Delta, delta=args.delta, tol=args.tol)
        if args.command == "verify":
            rep = pipeline.verify(circuit, method=args.method, **kw)
        else:
            rep = pipeline.run(
                circuit,
                shots=args.shots,
                seed=args.seed,
                method=args.method,
                model_postselection=args.model_postselection,
                verify=args.verify,
                dump_state=args.dump_state,
                **kw,
            )
        _emit(rep, args.report, out)
        if "verification" in rep and not rep["verification"]["ok"]:
            err.write("oracle mismatch\n")
            return EXIT_MISMATCH
        return EXIT_OK
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (NonCliffordGate, MethodTwoInputViolation, GateNotAdmitted) as exc:
        err.write(f"rejected: {exc}\n")
        return EXIT_REJECT
    except (SqueezingInsufficient, AliasingError, TruncationError) as exc:
        err.write(f"oracle error: {exc}\n")
        return EXIT_MISMATCH
    except (OSError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
