"""Command-line experiment driver.

Every subcommand writes one table (CSV or JSON) whose first lines echo the
fully resolved configuration.  Parameters can also come from environment
variables HYBRIDZETA_<NAME> (upper case, dashes as underscores); flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import counting, explicit_formulas, jutila_meansq, mellin, moments, plots
from .divisor_arith import build_divisor_table
from .errors import ConfigInvalid, HybridZetaError
from .quadrature import QuadratureSpec
from .reduction import get_precision, get_threads, set_precision, set_threads
from .zeta_eval import EvalPolicy, zeta_half_array

ENV_PREFIX = "HYBRIDZETA_"
FORMATS = ("csv", "json")


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# formatting
# --------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    s = str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def render(table: Table, config: dict, fmt: str) -> str:
    if fmt == "json":
        obj = {
            "config": {k: _plain(v) for k, v in config.items()},
            "results": [{c: _plain(v) for c, v in zip(table.columns, row)} for row in table.rows],
            "diagnostics": {k: _plain(v) for k, v in table.diagnostics.items()},
        }
        return json.dumps(obj, indent=2) + "\n"
    lines = [f"# {k} = {_fmt(v)}" for k, v in config.items()]
    lines += [f"# diagnostic {k} = {_fmt(v)}" for k, v in table.diagnostics.items()]
    lines.append(",".join(table.columns))
    lines += [",".join(_fmt(v) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over the target."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# experiments
# --------------------------------------------------------------------------


def _policy(a) -> EvalPolicy:
    return EvalPolicy(a.eval_method, a.target_abs_err, a.rs_order)


def _quad(a) -> QuadratureSpec:
    return QuadratureSpec(a.quad_policy, a.target_rel_err, a.max_evals, a.spacing_c)


def _G(a, T: float) -> float:
    return a.G if a.G is not None else T**a.G_exp


def _heights(a) -> np.ndarray:
    if a.steps == 1:
        return np.array([a.T_lo])
    return np.linspace(a.T_lo, a.T_hi, a.steps)


def exp_zeta_eval(a) -> Table:
    t = _heights(a)
    values, err = zeta_half_array(t, _policy(a))
    tab = Table(["t", "re", "im", "abs", "err_bound"])
    for ti, v, e in zip(t, values, err):
        tab.rows.append([ti, v.real, v.imag, abs(v), e])
    return tab


def exp_moment(a) -> Table:
    tab = Table(["k", "T", "value", "main", "error_term", "est_err", "evals"])
    for T in a.T:
        r = moments.moment_I(a.k, T, _quad(a), _policy(a))
        main = explicit_formulas.eval_main_term(explicit_formulas.P1, T) if a.k == 1 else float("nan")
        tab.rows.append([a.k, T, r.value, main, r.value - main, r.est_err, r.evals])
    return tab


def exp_smoothed(a) -> Table:
    tab = Table(["k", "t", "G", "value", "est_err", "evals"])
    for t in a.T:
        G = _G(a, t)
        r = moments.smoothed_J(a.k, t, G, _quad(a), _policy(a))
        tab.rows.append([a.k, t, G, r.value, r.est_err, r.evals])
    return tab


def exp_hybrid(a) -> Table:
    tab = Table(["T", "G", "value", "bound_ratio", "est_err", "evals"])
    for T in a.T:
        G = _G(a, T)
        q = _quad(a)
        spec = moments.HybridMomentSpec(a.k, a.l, a.m, T, G, q, q, extended=a.extended)
        r = moments.hybrid_moment(spec, _policy(a))
        ratio = r.value / moments.hybrid_expected_scale(a.k, a.l, a.m, T, G)
        tab.rows.append([T, G, r.value, ratio, r.est_err, r.evals])
    if a.exchange:
        T = a.T[-1]
        q = _quad(a)
        spec = moments.HybridMomentSpec(a.k, a.l, a.m, T, _G(a, T), q, q, extended=a.extended)
        tab.diagnostics["exchanged_value"] = moments.hybrid_exchanged(spec, _policy(a)).value
    return tab


def _error_ratio(kind: str, T: float, value: float) -> float:
    if kind == "E2":
        return value / (T ** (2 / 3) * math.log(T) ** 8)
    return value / T ** (1 / 3)


def exp_error_term(a) -> Table:
    T = _heights(a)
    poly = None
    table = None
    if a.kind == "E2":
        poly = explicit_formulas.fit_P4((a.calib_lo, a.calib_hi), a.calib_samples, _quad(a), _policy(a))
    if a.kind == "Estar":
        table = build_divisor_table(int(4 * T.max() / (2 * math.pi)) + 1)
    samples = explicit_formulas.error_term_scan(a.kind, T, poly, _quad(a), table, _policy(a))
    tab = Table(["T", "value", "moment", "main", "correction", "ratio"])
    for s in samples:
        tab.rows.append([s.T, s.value, s.moment, s.main, s.correction, _error_ratio(a.kind, s.T, s.value)])
    v = np.array([s.value for s in samples])
    tab.diagnostics["sign_changes"] = int(np.count_nonzero(np.diff(np.sign(v)) != 0))
    if poly is not None:
        for j, c in enumerate(poly.coeffs):
            tab.diagnostics[f"p4_a{j}"] = c
    return tab


def exp_atkinson(a) -> Table:
    tab = Table(["T", "G", "n_max", "direct", "main_term", "oscillating_sum", "residual", "log_T"])
    for T in a.T:
        G = _G(a, T)
        n_max = a.n_max if a.n_max is not None else explicit_formulas.default_cutoff(T, G)
        table = build_divisor_table(max(n_max, 2))
        s = explicit_formulas.atkinson_series_J1(T, G, table, a.kernel, n_max)
        direct = moments.smoothed_J(1, T, G, _quad(a), _policy(a)).value
        tab.rows.append([T, G, s.n_max, direct, s.main_term, s.oscillating_sum, direct - s.main_term - s.oscillating_sum, math.log(T)])
    return tab


def exp_estar_j1(a) -> Table:
    tab = Table(["t", "G", "direct", "via_estar", "difference", "log2_t"])
    for t in a.T:
        G = _G(a, t)
        table = build_divisor_table(int(2 * (t + G * math.log(t)) / math.pi) + 2)
        direct = moments.smoothed_J(1, t, G, _quad(a), _policy(a)).value
        via = explicit_formulas.j1_from_estar(t, G, table, q=_quad(a), policy=_policy(a))
        tab.rows.append([t, G, direct, via, direct - via, math.log(t) ** 2])
    return tab


def exp_count3(a) -> Table:
    r = counting.count_lemma3(counting.CountQuery3(a.M, a.Mp, a.delta), a.C_bound)
    return Table(["M", "Mp", "delta", "count", "bound_value", "ratio"], [[a.M, a.Mp, a.delta, r.count, r.bound_value, r.ratio]])


def exp_count4(a) -> Table:
    r = counting.count_lemma4(counting.CountQuery4(a.N, a.delta, a.k_root), a.C_bound, a.method)
    return Table(["N", "delta", "k_root", "count", "bound_value", "ratio"], [[a.N, a.delta, a.k_root, r.count, r.bound_value, r.ratio]])


def exp_jutila(a) -> Table:
    tab = Table(["T", "H", "U", "direct", "direct_err", "series", "direct_over_series", "asymp_scale", "asymp_ratio"])
    for T in a.T:
        U = a.U if a.U is not None else T**a.U_exp
        H = a.H if a.H is not None else T
        spec = jutila_meansq.DiffMeanSquareSpec(T, H, U, strict=a.strict)
        d = jutila_meansq.diff_meansq(spec, "direct", _quad(a), _policy(a))
        s = jutila_meansq.diff_meansq(spec, "series", _quad(a), _policy(a))
        scale = jutila_meansq.asymp_scale(T, U, H) if U < math.sqrt(T) else float("nan")
        tab.rows.append([T, H, U, d.value, d.est_err, s.value, d.value / s.value, scale, d.value / scale])
    return tab


def exp_mellin(a) -> Table:
    if a.scan:
        sc = mellin.z2_meansq_scan(a.sigma, a.T_lo, a.T_hi, a.steps, _quad(a), _policy(a), a.X)
        tab = Table(["t", "z2_abs2", "partial"])
        tab.rows = [[t, v, p] for t, v, p in zip(sc.t, sc.z2_abs2, sc.partial)]
        tab.diagnostics.update(slope=sc.slope, tail_bound=sc.tail_bound, growth_exponent=mellin.growth_exponent(a.sigma, a.rho))
        return tab
    spec = mellin.MellinSpec(a.sigma, a.t, a.X, a.tail_exponent, a.tail_mode)
    r = mellin.z2_eval(spec, _quad(a), _policy(a))
    tab = Table(["sigma", "t", "X_trunc", "re", "im", "modulus", "tail_bound", "est_err", "evals"])
    tab.rows.append([a.sigma, a.t, a.X, r.value.real, r.value.imag, r.modulus, r.tail_bound, r.est_err, r.evals])
    tab.diagnostics["tail_exponent"] = a.tail_exponent
    return tab


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigInvalid(message)


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("evaluation")
    g.add_argument("--eval-method", default="auto", choices=("auto", "euler_maclaurin", "riemann_siegel"))
    g.add_argument("--target-abs-err", type=float, default=1e-6)
    g.add_argument("--rs-order", type=int, default=2)
    g.add_argument("--quad-policy", default="uniform", choices=("uniform", "adaptive"))
    g.add_argument("--target-rel-err", type=float, default=1e-3)
    g.add_argument("--max-evals", type=int, default=4_000_000)
    g.add_argument("--spacing-c", type=float, default=0.125)
    o = p.add_argument_group("output")
    o.add_argument("--format", default="csv", choices=FORMATS)
    o.add_argument("--output", default="-", help="output file, '-' for stdout")
    o.add_argument("--threads", type=_positive_int, default=1)
    o.add_argument("--precision", default="f64", choices=("f64", "dd"))


def _G_args(p, default_exp: float) -> None:
    p.add_argument("--G", type=float, default=None, help="window width (overrides --G-exp)")
    p.add_argument("--G-exp", type=float, default=default_exp, help="G = T^G_exp")


EXPERIMENTS: dict[str, Callable] = {}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hybridzeta", description="Numerical experiments on moments of zeta(1/2+it).")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)

    def add(name: str, func: Callable, help: str):
        p = sub.add_parser(name, help=help)
        _common(p)
        p.set_defaults(func=func)
        EXPERIMENTS[name] = func
        return p

    p = add("zeta-eval", exp_zeta_eval, "zeta(1/2+it) on a grid")
    p.add_argument("--T-lo", type=float, default=100.0)
    p.add_argument("--T-hi", type=float, default=110.0)
    p.add_argument("--steps", type=_positive_int, default=11)

    p = add("moment", exp_moment, "I_k(T) and, for k = 1, E(T)")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--T", type=float, nargs="+", default=[1000.0])

    p = add("smoothed", exp_smoothed, "Gaussian-smoothed moments J_k(t, G)")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--T", type=float, nargs="+", default=[1000.0])
    _G_args(p, 0.3)

    p = add("hybrid", exp_hybrid, "hybrid moments")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--T", type=float, nargs="+", default=[1000.0])
    _G_args(p, 0.4)
    p.add_argument("--extended", action="store_true")
    p.add_argument("--exchange", action="store_true", help="also report the m = 1 exchanged-order value")

    p = add("error-term", exp_error_term, "E, E2 or E* on a grid of heights")
    p.add_argument("--kind", default="E", choices=explicit_formulas.ERROR_KINDS)
    p.add_argument("--T-lo", type=float, default=10.0)
    p.add_argument("--T-hi", type=float, default=2000.0)
    p.add_argument("--steps", type=_positive_int, default=400)
    p.add_argument("--calib-lo", type=float, default=1000.0)
    p.add_argument("--calib-hi", type=float, default=10000.0)
    p.add_argument("--calib-samples", type=int, default=40)

    p = add("atkinson", exp_atkinson, "explicit series for J_1 and its residual")
    p.add_argument("--T", type=float, nargs="+", default=[5000.0])
    _G_args(p, 0.3)
    p.add_argument("--kernel", default="exact", choices=explicit_formulas.KERNEL_MODES)
    p.add_argument("--n-max", type=_positive_int, default=None)

    p = add("estar-j1", exp_estar_j1, "J_1 through E* against direct quadrature")
    p.add_argument("--T", type=float, nargs="+", default=[3000.0])
    _G_args(p, 0.3)

    p = add("count3", exp_count3, "three-root Diophantine count")
    p.add_argument("--M", type=_positive_int, default=4)
    p.add_argument("--Mp", type=_positive_int, default=4)
    p.add_argument("--delta", type=float, default=1e-9)
    p.add_argument("--C-bound", type=float, default=1.0)

    p = add("count4", exp_count4, "four-root Diophantine count")
    p.add_argument("--N", type=_positive_int, default=32)
    p.add_argument("--delta", type=float, default=2.0**-10)
    p.add_argument("--k-root", type=int, default=2)
    p.add_argument("--method", default="mitm", choices=("mitm", "naive"))
    p.add_argument("--C-bound", type=float, default=1.0)

    p = add("jutila", exp_jutila, "mean square of E(x+U) - E(x)")
    p.add_argument("--T", type=float, nargs="+", default=[3000.0])
    p.add_argument("--H", type=float, default=None, help="interval length, default T")
    p.add_argument("--U", type=float, default=None, help="shift (overrides --U-exp)")
    p.add_argument("--U-exp", type=float, default=0.4)
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)

    p = add("mellin", exp_mellin, "truncated Mellin transform of |zeta|^4")
    p.add_argument("--sigma", type=float, default=1.5)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--X", type=float, default=1000.0)
    p.add_argument("--tail-exponent", type=float, default=mellin.DEFAULT_TAIL_EXPONENT)
    p.add_argument("--tail-mode", default="moment", choices=mellin.TAIL_MODES)
    p.add_argument("--scan", action="store_true", help="mean-square scan over t in [T_lo, T_hi]")
    p.add_argument("--T-lo", type=float, default=1.0)
    p.add_argument("--T-hi", type=float, default=50.0)
    p.add_argument("--steps", type=_positive_int, default=200)
    p.add_argument("--rho", type=float, default=mellin.DEFAULT_RHO)

    p = sub.add_parser("plot", help="write a gnuplot script for a result file")
    p.add_argument("input")
    p.add_argument("--kind", required=True, choices=plots.PLOT_KINDS)
    p.add_argument("--output", default="-")
    p.set_defaults(func=None)
    return parser


def _env_overrides(parser: argparse.ArgumentParser, experiment: str, environ) -> None:
    """Apply HYBRIDZETA_* variables as defaults of the chosen subcommand."""
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    known: dict[str, str] = {}
    for p in sub.choices.values():
        known.update((a.dest.lower(), a.dest) for a in p._actions if a.dest != "help")
    target = sub.choices.get(experiment)
    for key, raw in environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        dest = known.get(key[len(ENV_PREFIX) :].lower())
        if dest is None:
            raise ConfigInvalid(f"unknown configuration key {key}")
        if target is None:
            continue
        action = next((a for a in target._actions if a.dest == dest), None)
        if action is None:
            continue
        if isinstance(action, (argparse._StoreTrueAction, argparse.BooleanOptionalAction)):
            value = raw.strip().lower() in ("1", "true", "yes", "on")
        elif action.nargs in ("+", "*"):
            value = [action.type(v) if action.type else v for v in raw.replace(",", " ").split()]
        else:
            try:
                value = action.type(raw) if action.type else raw
            except (TypeError, ValueError) as exc:
                raise ConfigInvalid(f"{key}: {exc}") from exc
            if action.choices is not None and value not in action.choices:
                raise ConfigInvalid(f"{key}: {value!r} not in {sorted(action.choices)}")
        target.set_defaults(**{dest: value})


def parse(argv: Sequence[str] | None = None, environ=None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    environ = os.environ if environ is None else environ
    experiment = next((a for a in argv if not a.startswith("-")), None)
    _env_overrides(parser, experiment, environ)
    return parser.parse_args(argv)


# scheduling knobs that cannot change any number in the output
_NOT_ECHOED = ("func", "experiment", "output", "threads")


def resolved_config(args: argparse.Namespace) -> dict:
    cfg = {"experiment": args.experiment}
    for k, v in vars(args).items():
        if k in _NOT_ECHOED:
            continue
        cfg[k] = " ".join(_fmt(x) for x in v) if isinstance(v, list) else v
    return cfg


def run(args: argparse.Namespace) -> str:
    if args.experiment == "plot":
        text = plots.emit_plot_script(args.input, args.kind)
    else:
        saved = get_threads(), get_precision()
        set_threads(args.threads)
        set_precision(args.precision)
        try:
            table = args.func(args)
        finally:
            set_threads(saved[0])
            set_precision(saved[1])
        text = render(table, resolved_config(args), args.format)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        write_atomic(args.output, text)
    return text


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse(argv)
        run(args)
    except HybridZetaError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
