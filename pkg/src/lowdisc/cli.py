"""Command-line interface.

Subcommands:

    generate     build a design and write it as CSV (+ JSON metadata sidecar)
    discrepancy  score a design CSV against a target/kernel, emit JSON
    optimize     run the coordinate exchange on a design CSV
    study        run one of the canned studies, emit CSV
    verify       check the closed-form kernel integrals by quadrature

Exit codes: 0 success, 2 contract violation, 3 numerical error, 4 size
refusal.  Point/coordinate indices and subset keys in outputs are 1-based to
match the x1..xd column naming.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .design import Domain
from .discrepancy import discrepancy_report
from .errors import ContractViolationError, NumericalError, SizeRefusalError
from .generators import (
    GeneratorConfig,
    GeneratorKind,
    config_meta,
    generate,
    load_design,
    save_design,
    transform_to_target,
)
from .kernels import kernel_by_name
from .optimizer import ExchangeConfig, coordinate_exchange, save_trace
from .targets import TargetKind, target_by_name
from .experiments import Study, StudyConfig, run_study, verify_appendix

_DOMAIN_FOR_TARGET = {
    "unit": Domain.UNIT_CUBE,
    "centered": Domain.CENTERED_CUBE,
    "normal": Domain.REAL_SPACE,
}


def _cmd_generate(args) -> int:
    config = GeneratorConfig(
        kind=GeneratorKind(args.kind), n=args.n, d=args.d, seed=args.seed, skip=args.skip
    )
    design = generate(config)
    if args.target != "unit":
        design = transform_to_target(design, target_by_name(args.target, args.d))
    save_design(design, args.out, meta=config_meta(config, target=args.target))
    print(f"wrote {design.n} x {design.d} design to {args.out}")
    return 0


def _parse_weights(text: str | None, d: int):
    if text is None:
        return None
    values = np.array([float(v) for v in text.split(",")], dtype=np.float64)
    if values.size != d:
        raise ContractViolationError(f"expected {d} weights, got {values.size}")
    return values


def _cmd_discrepancy(args) -> int:
    design = load_design(args.design, _DOMAIN_FOR_TARGET[args.target])
    target = target_by_name(args.target, design.d)
    kernel = kernel_by_name(args.kernel, weights=_parse_weights(args.weights, design.d))
    report = discrepancy_report(design, target, kernel, pieces_order=args.pieces)
    payload = {"squared": report.squared, "value": report.value}
    if report.pieces is not None:
        payload["pieces"] = {
            ",".join(str(j + 1) for j in subset): value
            for subset, value in sorted(report.pieces.items())
        }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_optimize(args) -> int:
    design = load_design(args.design, _DOMAIN_FOR_TARGET[args.target])
    target = target_by_name(args.target, design.d)
    config = ExchangeConfig(tol=args.tol, max_iters=args.max_iters)
    optimized, trace = coordinate_exchange(design, target, config=config)
    save_design(
        optimized,
        args.out,
        meta={
            "source": str(args.design),
            "target": args.target,
            "tol": args.tol,
            "max_iters": args.max_iters,
            "seed": args.seed,  # recorded for provenance; the exchange itself is deterministic
            "iterations": trace.iterations,
            "terminated_by": trace.terminated_by.value,
            "initial_discrepancy": trace.initial_discrepancy,
            "final_discrepancy": trace.final_discrepancy,
        },
    )
    if args.trace:
        save_trace(trace, args.trace)
    print(
        f"{trace.iterations} exchanges ({trace.terminated_by.value}); "
        f"discrepancy {trace.initial_discrepancy:.6g} -> {trace.final_discrepancy:.6g}"
    )
    return 0


def _cmd_study(args) -> int:
    dims = tuple(int(v) for v in args.dims.split(",")) if args.dims else ()
    sizes = tuple(int(v) for v in args.sizes.split(",")) if args.sizes else ()
    if (dims and not sizes) or (sizes and not dims) or (dims and len(dims) != len(sizes)):
        raise ContractViolationError("--dims and --sizes must be comma lists of equal length")
    config = StudyConfig(
        study=Study(args.which),
        dims=dims,
        sizes=sizes,
        replicates=args.replicates,
        seed=args.seed,
    )
    run_study(config, out_path=args.out)
    print(f"wrote {args.which} study results to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    check = verify_appendix(args.d)
    print(
        f"one-fold closed form vs quadrature: max |err| = {check.single_max_abs_err:.3e} "
        f"({'ok' if check.single_ok else 'FAIL'})"
    )
    print(
        f"two-fold mean (d={check.d}): quadrature {check.double_quadrature:.12f} "
        f"vs closed {check.double_closed:.12f}, |err| = {check.double_abs_err:.3e} "
        f"({'ok' if check.double_ok else 'FAIL'})"
    )
    if not check.ok:
        raise NumericalError("quadrature verification failed tolerance")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lowdisc", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a design CSV")
    g.add_argument("--kind", required=True, choices=[k.value for k in GeneratorKind])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--skip", type=int, default=0)
    g.add_argument("--target", choices=[k.value for k in TargetKind], default="unit")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    s = sub.add_parser("discrepancy", help="score a design CSV")
    s.add_argument("--design", required=True)
    s.add_argument("--target", required=True, choices=list(_DOMAIN_FOR_TARGET))
    s.add_argument(
        "--kernel", required=True, choices=["origin", "centered-l2", "transformed-normal"]
    )
    s.add_argument("--weights", default=None, help="comma list g1,...,gd")
    s.add_argument("--pieces", type=int, default=None, help="projection order to decompose to")
    s.add_argument("--out", default=None)
    s.set_defaults(func=_cmd_discrepancy)

    o = sub.add_parser("optimize", help="coordinate-exchange a design CSV")
    o.add_argument("--design", required=True)
    o.add_argument("--target", default="normal", choices=list(_DOMAIN_FOR_TARGET))
    o.add_argument("--tol", type=float, default=1e-10)
    o.add_argument("--max-iters", type=int, default=200)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out", required=True)
    o.add_argument("--trace", default=None)
    o.set_defaults(func=_cmd_optimize)

    st = sub.add_parser("study", help="run a canned study")
    st.add_argument("which", choices=["cubature", "correlation", "compare"])
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--replicates", type=int, required=True)
    st.add_argument("--dims", default=None, help="comma list of dimensions")
    st.add_argument("--sizes", default=None, help="comma list of sample sizes")
    st.add_argument("--out", required=True)
    st.set_defaults(func=_cmd_study)

    v = sub.add_parser("verify", help="verify closed forms by quadrature")
    v.add_argument("what", choices=["appendix"])
    v.add_argument("--d", type=int, default=1, choices=[1, 2])
    v.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeRefusalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ContractViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
