"""Command line interface.

Exit codes: 0 success / accept, 1 reject, 2 bad input, 3 size bound
exceeded, 4 truncation failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import distribution, divisibility, existence
from .alpha_det import AlphaClass, alpha_det, as_alpha
from .errors import (
    DimensionTooLarge,
    InvalidAlpha,
    KernelFileError,
    NegativeWeight,
    NonRealWeight,
    OutsideConvergenceDomain,
    SingularOperator,
    TruncationFailure,
)
from .kernelfile import read_kernel
from .operators import expansion_radius, expansion_table, verify_expansion

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_INPUT = 2
EXIT_BOUND = 3
EXIT_TRUNCATION = 4


def format_number(x, digits: int = 12) -> str:
    """Fixed-point with `digits` decimals, trailing zeros stripped; complex as a+bj."""
    x = complex(x)
    re = round(x.real, digits) + 0.0
    im = round(x.imag, digits) + 0.0

    def fmt(v):
        s = f"{v:.{digits}f}".rstrip("0").rstrip(".")
        return "0" if s in ("", "-0") else s

    if im == 0:
        return fmt(re)
    sign = "+" if im > 0 else "-"
    return f"{fmt(re)}{sign}{fmt(abs(im))}j"


def format_counts(n) -> str:
    """(n_0,...,n_{d-1}); the empty configuration prints as ()."""
    return "()" if not any(n) else "(" + ",".join(map(str, n)) + ")"


def _emit(doc: dict):
    print(json.dumps(doc, indent=2, sort_keys=False, allow_nan=False))


def _header(args, K, alpha) -> dict:
    return {"file": str(args.file), "dim": K.dim, "alpha": alpha.to_dict()}


def cmd_alphadet(args) -> int:
    K, _ = read_kernel(args.file)
    print(format_number(alpha_det(K, args.alpha)))
    return EXIT_OK


def cmd_check(args) -> int:
    K, _ = read_kernel(args.file)
    alpha = as_alpha(args.alpha)
    verdict = existence.check_existence(K, alpha, n_max=args.n_max)
    doc = _header(args, K, alpha)
    doc.update(verdict.to_dict())
    if not alpha.positive and K.hermitian:
        doc["selfadjoint_check"] = existence.check_selfadjoint(K, alpha).to_dict()
    _emit(doc)
    return EXIT_OK if verdict.accepted else EXIT_REJECT


def cmd_divisible(args) -> int:
    K, _ = read_kernel(args.file)
    alpha = as_alpha(args.alpha)
    verdict = divisibility.check_divisible(K, alpha, n_max=args.n_max)
    doc = _header(args, K, alpha)
    doc.update(verdict.to_dict())
    if alpha.positive and K.is_real and K.hermitian:
        doc["symmetric_check"] = divisibility.check_divisible_symmetric(
            K, alpha, n_max=args.n_max).to_dict()
    _emit(doc)
    return EXIT_OK if verdict.accepted else EXIT_REJECT


def cmd_sample(args) -> int:
    K, _ = read_kernel(args.file)
    alpha = as_alpha(args.alpha)
    if args.count < 1:
        raise ValueError("--count must be positive")
    batch = distribution.sample(K, alpha, args.count, seed=args.seed,
                                mass_target=args.mass_target)
    out = sys.stdout
    out.write("".join(" ".join(map(str, row)) + "\n" for row in batch.draws.tolist()))
    if args.validate:
        report = distribution.validate_moments(batch, K, alpha)
        report["bias_bound"] = batch.bias_bound
        out.write(json.dumps(report, allow_nan=False) + "\n")
    return EXIT_OK


def _default_z(K, alpha, order: int) -> np.ndarray:
    """A point where the truncated series is accurate to well below 1e-8."""
    d = K.dim
    if alpha.kind is AlphaClass.NEG_RECIPROCAL_INT and order >= alpha.m * d:
        return np.full(d, 0.5)
    rho = expansion_radius(K, alpha, np.ones(d))
    # tail <= binom(order + d, d) r**(order + 1) / (1 - r) for ratio r
    target = 1e-11 / (2.0 * (order + 2) ** d)
    r = min(0.5, target ** (1.0 / (order + 1)))
    c = 0.5 if rho == 0 else min(0.5, r / rho)
    return np.full(d, c)


def cmd_expand(args) -> int:
    K, _ = read_kernel(args.file)
    alpha = as_alpha(args.alpha)
    if args.order < 0:
        raise ValueError("--order must be nonnegative")
    for n, coef in expansion_table(K, alpha, args.order):
        print(f"{format_counts(n)} {format_number(coef)}")
    if args.z is not None:
        z = np.array([complex(v.replace("i", "j")) for v in args.z.split(",")])
        if z.shape != (K.dim,):
            raise ValueError(f"--z needs {K.dim} comma-separated values")
    else:
        z = _default_z(K, alpha, args.order)
    residual = verify_expansion(K, alpha, z, args.order)
    print("z " + " ".join(format_number(v) for v in z))
    print(f"residual {residual:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alphadpp",
        description="alpha-determinants and alpha-determinantal point processes "
                    "on finite ground spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", help="kernel JSON file")
        p.add_argument("--alpha", type=float, required=True)
        p.set_defaults(func=func)
        return p

    add("alphadet", cmd_alphadet, "print det_alpha of the matrix")
    p = add("check", cmd_check, "decide existence of the process (JSON report)")
    p.add_argument("--n-max", type=int, default=existence.DEFAULT_N_MAX)
    p = add("divisible", cmd_divisible, "decide infinite divisibility (JSON report)")
    p.add_argument("--n-max", type=int, default=divisibility.DEFAULT_N_MAX)
    p = add("sample", cmd_sample, "draw multiplicity vectors, one per line")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mass-target", type=float, default=distribution.DEFAULT_MASS_TARGET)
    p.add_argument("--validate", action="store_true",
                   help="append a JSON factorial-moment check")
    p = add("expand", cmd_expand, "print expansion coefficients and the series residual")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--z", help="comma-separated evaluation point, e.g. 0.1,0.2+0.1j")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DimensionTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except TruncationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (KernelFileError, InvalidAlpha, OutsideConvergenceDomain, SingularOperator,
            NonRealWeight, NegativeWeight, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
