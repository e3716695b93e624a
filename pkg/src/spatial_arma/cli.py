"""Command-line interface: ``spatial-arma {check,coeffs,simulate,delannoy,spectrum}``.

Exit codes: 0 Exists, 1 NotExists, 2 Unknown for ``check`` (0 on success
elsewhere); 64 usage or malformed input, 65 dimension mismatch, 66 aliasing
refusal, 67 truncation larger than the coefficient box.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import delannoy as dl
from .existence import (EXISTS, NOT_EXISTS, check_causal, check_first_order_2d,
                        check_linear_stationary)
from .noise import noise_from_name
from .polycore import DimensionError, ModelSpec, arma_polys, eval_poly, model_from_json
from .simulator import (LatticeWindow, TruncationError, arma_residual, linear_field,
                        nonunique_perturbation, residual_tail_bound, sample_noise)
from .spectral import (AliasingError, CoefficientField, TorusGrid, causal_alpha, decay_fit,
                       fourier_psi, l2_spectral_sequence, zero_search_torus)

EX_USAGE, EX_DIM, EX_ALIAS, EX_TRUNC = 64, 65, 66, 67
VERDICT_CODES = {EXISTS: 0, NOT_EXISTS: 1}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EX_USAGE)


def _noise_arg(text: str):
    try:
        return noise_from_name(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spatial-arma", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, model=True):
        sp.add_argument("--config", help="JSON file with option defaults (flags win)")
        if model:
            sp.add_argument("--model", help="model JSON with keys d, R, phi, S, theta")

    c = sub.add_parser("check", help="existence verdict for a model and a noise law")
    common(c)
    c.add_argument("--noise", type=_noise_arg, default="gaussian")
    c.add_argument("--mode", choices=["auto", "linear", "causal", "first-order"], default="auto")
    c.add_argument("--levels", type=_positive, default=None,
                   help="refinement doublings of the torus quadrature")
    c.add_argument("--box", type=_positive, default=None,
                   help="per-axis box of the causal recursion")

    k = sub.add_parser("coeffs", help="solution coefficients as CSV plus a decay fit")
    common(k)
    k.add_argument("--method", choices=["fft", "recursion", "delannoy"], default="recursion")
    k.add_argument("--box", type=int, default=10)
    k.add_argument("--grid", type=_positive, default=None, help="torus resolution per axis")
    k.add_argument("--out", help="CSV destination (default stdout)")
    k.add_argument("--decay-out", help="decay fit JSON destination (default stderr)")

    s = sub.add_parser("simulate", help="truncated solution field, PGM heatmap and residual")
    common(s)
    s.add_argument("--noise", type=_noise_arg, default="gaussian")
    s.add_argument("--size", type=_int_list, default=[128])
    s.add_argument("--truncation", type=int, default=30)
    s.add_argument("--box", type=int, default=None, help="coefficient box (default: truncation)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--perturb", type=_float_list, default=None, metavar="LAMBDA",
                   help="add exp(2 pi i U) exp(i t.lambda); comma separated lambda")
    s.add_argument("--perturb-u", type=float, default=0.0, metavar="U")
    s.add_argument("--out-dir", default="simulation")

    d = sub.add_parser("delannoy", help="weighted Delannoy table or Jacobi identity check")
    common(d, model=False)
    d.add_argument("--phi", type=_float_list, default=[0.5, 0.3, 0.1], help="phi1,phi2,phi3")
    d.add_argument("--n", type=int, default=10)
    d.add_argument("--k", type=int, default=10)
    d.add_argument("--identity", action="store_true",
                   help="emit the Jacobi comparison for beta <= --beta-max, k <= --k")
    d.add_argument("--beta-max", type=int, default=5)

    sp = sub.add_parser("spectrum", help="torus quadrature sequence and zero search")
    common(sp)
    sp.add_argument("--levels", type=_positive, default=None)
    sp.add_argument("--base", type=_positive, default=None)
    return p


# ---------------------------------------------------------------------------

def _load_model(path) -> ModelSpec:
    if not path:
        raise UsageError("--model is required")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read model file: {exc}") from None
    try:
        return model_from_json(text)
    except DimensionError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"malformed model JSON: {exc}") from None


def _first_order_params(model: ModelSpec):
    """(phi1, phi2, phi3) when the model is the first-order planar AR, else None."""
    if model.dim != 2 or model.theta:
        return None
    allowed = {(1, 0): 0, (0, 1): 1, (1, 1): 2}
    if any(k not in allowed for k in model.phi):
        return None
    if any(c.imag != 0 for c in model.phi.values()):
        return None
    out = [0.0, 0.0, 0.0]
    for k, c in model.phi.items():
        out[allowed[k]] = c.real
    if not any(out):
        return None
    return tuple(out)


def cmd_check(args) -> int:
    model = _load_model(args.model)
    mode = args.mode
    fo = _first_order_params(model)
    if mode == "auto":
        mode = "first-order" if fo else ("causal" if model.is_causal_mode else "linear")
    if mode == "first-order":
        if fo is None:
            raise UsageError("first-order mode needs d=2, R within {(1,0),(0,1),(1,1)} and S empty")
        rep = check_first_order_2d(*fo, args.noise)
    elif mode == "causal":
        rep = check_causal(model, args.noise, box=args.box)
    else:
        rep = check_linear_stationary(model, args.noise, levels=args.levels,
                                      allow_deterministic=True)
    sys.stdout.write(rep.to_json() + "\n")
    return VERDICT_CODES.get(rep.verdict, 2)


def _coefficients(model: ModelSpec, method: str, box: int, grid=None) -> CoefficientField:
    if box < 0:
        raise UsageError("--box must be nonnegative")
    if method == "delannoy":
        fo = _first_order_params(model)
        if fo is None:
            raise UsageError("--method delannoy needs the first-order planar model")
        field = dl.delannoy_field(fo, box)
    elif method == "recursion":
        if not model.is_causal_mode:
            raise UsageError("--method recursion needs R and S in the nonnegative orthant")
        if model.is_pure_ma:
            reach = [0] * model.dim
            for kk in model.theta:
                reach = [max(a, b) for a, b in zip(reach, kk)]
            field = causal_alpha(model, [min(box, r) for r in reach])
        else:
            field = causal_alpha(model, box)
    else:
        m = grid or max(64, 1 << math.ceil(math.log2(4 * (2 * box + 1))))
        if m < 4 * (2 * box + 1):
            raise UsageError("--grid must be at least four times the kept box")
        return fourier_psi(model, TorusGrid.uniform(model.dim, m), box)
    field.decay = decay_fit(field)
    return field


def _write(path, data, binary=False):
    if path is None:
        if binary:
            sys.stdout.buffer.write(data)
        else:
            sys.stdout.write(data)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    if binary:
        Path(path).write_bytes(data)
    else:
        Path(path).write_text(data)


def cmd_coeffs(args) -> int:
    model = _load_model(args.model)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        field = _coefficients(model, args.method, args.box, args.grid)
    _write(args.out, field.to_csv())
    decay = field.decay_json() + "\n"
    if args.decay_out:
        _write(args.decay_out, decay)
    else:
        sys.stderr.write(decay)
    return 0


def cmd_simulate(args) -> int:
    model = _load_model(args.model)
    d = model.dim
    size = args.size * d if len(args.size) == 1 else args.size
    if len(size) != d:
        raise DimensionError(f"--size has {len(size)} entries, the model has d={d}")
    if any(v <= 0 for v in size):
        raise UsageError("--size entries must be positive")
    N = args.truncation
    box = N if args.box is None else args.box
    if N < 0 or box < 0:
        raise UsageError("--truncation and --box must be nonnegative")
    if N > box:
        raise TruncationError(f"truncation {N} exceeds the coefficient box {box}")
    if model.is_causal_mode:
        coeffs = causal_alpha(model, box)
        coeffs.decay = decay_fit(coeffs)
    else:
        m = max(64, 1 << math.ceil(math.log2(4 * (2 * box + 1))))
        coeffs = fourier_psi(model, TorusGrid.uniform(d, m), box)
    win = LatticeWindow.box(size)
    noise = args.noise
    Y = linear_field(coeffs, noise, win, N, args.seed)
    Z = sample_noise(noise, win, args.seed)
    res = arma_residual(model, Y, Z)
    report = {"residual": res.to_dict(), "noise": noise.describe(), "seed": args.seed,
              "truncation": N, "window": [list(win.lower), list(win.upper)]}
    if coeffs.support_kind == "causal-orthant":
        zwin = LatticeWindow(tuple(np.asarray(win.lower) - N), win.upper)
        zsup = float(np.abs(sample_noise(noise, zwin, args.seed).values).max())
        report["tail_bound"] = residual_tail_bound(model, coeffs, N, zsup, noise).to_dict()
        report["within_bound"] = bool(res.max_abs <= float(report["tail_bound"]["value"]))
    out_field = Y
    if args.perturb is not None:
        if len(args.perturb) != d:
            raise DimensionError(f"--perturb needs {d} entries")
        P = nonunique_perturbation(Y, args.perturb, args.perturb_u)
        rp = arma_residual(model, P, Z)
        phi, _ = arma_polys(model)
        expected = abs(eval_poly(phi, np.exp(-1j * np.asarray(args.perturb))))
        delta = np.abs(rp.values - res.values)
        report["perturbation"] = {
            "lambda": [_fmt(v) for v in args.perturb], "U": _fmt(args.perturb_u),
            "residual_max_abs": _fmt(rp.max_abs),
            "delta_min": _fmt(delta.min()), "delta_max": _fmt(delta.max()),
            "abs_phi_at_lambda": _fmt(expected),
        }
        out_field = P
    out = Path(args.out_dir)
    _write(out / "field.csv", out_field.to_csv())
    if d == 2:
        _write(out / "field.pgm", out_field.to_pgm(), binary=True)
    _write(out / "residual.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_delannoy(args) -> int:
    if len(args.phi) != 3:
        raise UsageError("--phi needs three comma separated weights")
    p = dl.DelannoyParams(*args.phi)
    if args.n < 0 or args.k < 0:
        raise UsageError("--n and --k must be nonnegative")
    if args.identity:
        if p.phi3 == 0:
            raise UsageError("the Jacobi identity needs phi3 != 0")
        rows = []
        for beta in range(args.beta_max + 1):
            for kk in range(args.k + 1):
                lhs, rhs, diff = dl.jacobi_delannoy_identity(p, beta, kk)
                rows.append({"beta": beta, "k": kk, "lhs": _fmt(lhs), "rhs": _fmt(rhs),
                             "abs_diff": _fmt(diff)})
        out = {"phi": [_fmt(v) for v in p], "rows": rows,
               "max_abs_diff": _fmt(max(float(r["abs_diff"]) for r in rows))}
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
        return 0
    table = dl.delannoy_table(p, args.n, args.k)
    lines = ["n,k,psi"]
    for i in range(args.n + 1):
        for j in range(args.k + 1):
            lines.append(f"{i},{j},{_fmt(table[i, j])}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_spectrum(args) -> int:
    model = _load_model(args.model)
    seq = l2_spectral_sequence(model, levels=args.levels, base=args.base)
    phi, _ = arma_polys(model)
    zr = zero_search_torus(phi)
    out = json.loads(seq.to_json())
    out["torus_min_modulus"] = _fmt(zr.min_modulus)
    out["torus_zeros"] = [[_fmt(v) for v in z] for z in zr.zeros]
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return 0


COMMANDS = {"check": cmd_check, "coeffs": cmd_coeffs, "simulate": cmd_simulate,
            "delannoy": cmd_delannoy, "spectrum": cmd_spectrum}


def _apply_config(parser, argv):
    """Re-parse with defaults taken from ``--config`` so explicit flags win."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        action = known[dest]
        if action.type is not None and isinstance(value, (str, int, float)):
            try:
                value = action.type(str(value) if action.type in (_noise_arg, _int_list,
                                                                   _float_list) else value)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"bad config value for {key!r}: {exc}") from None
        elif isinstance(value, list):
            value = list(value)
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EX_USAGE
    except DimensionError as exc:
        sys.stderr.write(f"dimension mismatch: {exc}\n")
        return EX_DIM
    except AliasingError as exc:
        sys.stderr.write(f"refusing to alias: {exc}\n")
        return EX_ALIAS
    except TruncationError as exc:
        sys.stderr.write(f"truncation error: {exc}\n")
        return EX_TRUNC
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
