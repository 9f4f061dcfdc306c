"""Command-line front end: ``xxz-lab <command> [options]``.

Exit status: 0 on success, 1 on usage or parameter errors, 2 when a
validation check fails.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import product

from . import __version__
from .domains import parse_shape
from .error_bounds import REPORT_FIELDS, certified_normalized_energy_interval, error_report_row
from .exact import DEFAULT_MAX_SITES, kernel_dimension
from .exceptions import XXZError
from .lattice import chain_of, make_cylinder
from .laplacian import analytic_reference, extrapolated_eigenvalues
from .report import ReportError, emit_report
from .shapes import REGISTRY, first_mode, get_shape
from .states import interface, make_aniso
from .variational import (ansatz_rayleigh, check_g_bounds, g_function, gap_bound,
                          g_lower_bound, normalized_energy_closed_form, smallest_valid_L)

log = logging.getLogger("xxz_lab")

COMMANDS = ("gap-bound", "g-scan", "energy", "exact-diag", "error-report", "validate")

# name -> (converter, default); list-valued options take comma-separated values
OPTIONS = {
    "delta": ("floats", "2.0"),
    "mu": ("floats", "0.0"),
    "L": ("ints", "2"),
    "R": ("floats", "10.0"),
    "d": ("int", None),
    "shape": ("str", "interval"),
    "phi": ("str", None),
    "h": ("float", None),
    "sites": ("int", None),
    "output": ("str", "-"),
    "format": ("str", "csv"),
    "seed": ("int", "0"),
    "max-sites": ("int", str(DEFAULT_MAX_SITES)),
}


class UsageError(XXZError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="xxz-lab", description="Variational gap bounds for XXZ interface states.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command")
    helps = {
        "gap-bound": "lambda_1 g / (2 Delta R^2) with the certified interval of the first-mode ansatz",
        "g-scan": "g(Delta, mu) and its bounds over a parameter grid",
        "energy": "exact Rayleigh quotient of the product ansatz vs the closed form",
        "exact-diag": "kernel dimension and gap by exact diagonalization",
        "error-report": "eps budget and certified interval per shape function",
        "validate": "run every oracle and containment suite",
    }
    for name in COMMANDS:
        c = sub.add_parser(name, help=helps[name])
        c.add_argument("--config", help="key = value file with one section per command")
        for opt in OPTIONS:
            c.add_argument(f"--{opt}", dest=opt.replace("-", "_"), default=None)
        c.add_argument("-v", "--verbose", action="store_true")
    return p


def _convert(name, text):
    kind = OPTIONS[name][0]
    try:
        if text is None:
            return None
        if kind == "floats":
            return [float(v) for v in str(text).split(",") if v.strip()]
        if kind == "ints":
            return [int(v) for v in str(text).split(",") if v.strip()]
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        return str(text)
    except ValueError:
        raise UsageError(f"--{name}: cannot parse {text!r}") from None


def resolve(args):
    """Merge built-in defaults, the config file section and flags (flags win)."""
    merged = {name: default for name, (_, default) in OPTIONS.items()}
    if args.config:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        if not cp.read(args.config):
            raise UsageError(f"cannot read config file {args.config}")
        for section in ("common", args.command):
            if cp.has_section(section):
                for key, value in cp.items(section):
                    if key not in OPTIONS:
                        raise UsageError(f"{args.config}: unknown key {key!r} in [{section}]")
                    merged[key] = value
    for name in OPTIONS:
        flag = getattr(args, name.replace("-", "_"))
        if flag is not None:
            merged[name] = flag
    cfg = {name: _convert(name, value) for name, value in merged.items()}
    if cfg["format"] not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {cfg['format']!r}")
    return cfg


def _threads():
    try:
        return max(1, int(os.environ.get("XXZ_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _grid_map(fn, grid):
    """Apply fn over the grid; rows come back in grid order whatever the thread count."""
    grid = list(grid)
    n = min(_threads(), len(grid)) or 1
    if n == 1:
        return [fn(*p) for p in grid]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda p: fn(*p), grid))


def _single(cfg, name):
    vals = cfg[name]
    if len(vals) != 1:
        raise UsageError(f"--{name} takes a single value for this command")
    return vals[0]


def _domain_and_phi(cfg):
    """Domain from --shape, shape function from --phi (which fixes the domain if given)."""
    ids = [p.strip() for p in cfg["phi"].split(",")] if cfg["phi"] else []
    phis = [get_shape(p) for p in ids]
    if len({p.domain.describe() for p in phis}) > 1:
        raise UsageError("--phi ids must share one domain")
    phi = phis[0] if phis else None
    domain = parse_shape(cfg["shape"])
    if phi is not None:
        if type(phi.domain) is not type(domain):
            raise UsageError(f"{phi.id} is defined on {phi.domain.describe()}, not {domain.describe()}")
        domain = phi.domain
    elif domain.describe() == first_mode_domain(domain):
        phi = first_mode(domain)
    return domain, phi


def first_mode_domain(domain):
    try:
        return first_mode(domain).domain.describe()
    except KeyError:
        return None


def _dimension(cfg, domain):
    d = cfg["d"] if cfg["d"] is not None else domain.dim + 1
    if d != domain.dim + 1:
        raise UsageError(f"--d {d} does not match the {domain.dim}-dimensional {domain.name}")
    return d


# ---------------------------------------------------------------- commands

def cmd_gap_bound(cfg):
    domain, phi = _domain_and_phi(cfg)
    if cfg["h"] is not None:
        lam1, source = extrapolated_eigenvalues(domain, cfg["h"])[0].extrapolated, f"extrapolated h={cfg['h']:g}"
    else:
        lam1 = analytic_reference(domain)
        source = "analytic"
        if lam1 is None:
            lam1, source = extrapolated_eigenvalues(domain, 1 / 64)[0].extrapolated, "extrapolated h=1/64"
    d = _dimension(cfg, domain)

    def row(delta, mu, L, R):
        a, spec = make_aniso(delta), interface(mu)
        out = {"delta": delta, "mu": mu, "L": L, "R": R, "g": g_function(L, spec, a).g,
               "lower_bound": g_lower_bound(a), "upper_bound": 1.0, "lambda1": lam1,
               "lambda1_source": source, "gap_bound": gap_bound(lam1, R, spec, a, L),
               "phi_id": phi.id if phi else "", "normalized_energy": float("nan"),
               "certified_lo": float("nan"), "certified_hi": float("nan")}
        if phi is not None:
            out["normalized_energy"] = normalized_energy_closed_form(phi, R, L, spec, a)
            cyl = make_cylinder(domain, R, d, L)
            iv = certified_normalized_energy_interval(phi, R, L, spec, a, cyl=cyl, strict=False)
            out["certified_lo"], out["certified_hi"] = iv.lower, iv.upper
        return out

    return _grid_map(row, product(cfg["delta"], cfg["mu"], cfg["L"], cfg["R"]))


def cmd_g_scan(cfg):
    def row(delta, mu, L):
        a, spec = make_aniso(delta, degenerate=(delta == 1.0)), interface(mu)
        gv = g_function(L, spec, a)
        rep = check_g_bounds(gv, a, L, mu)
        return {"delta": delta, "mu": mu, "L": L, "g": gv.g, "numerator": gv.numerator_sum,
                "denominator": gv.denominator_sum, "lower_bound": rep.lower, "upper_bound": rep.upper,
                "lower_ok": rep.lower_ok, "upper_ok": rep.upper_ok,
                "smallest_L": smallest_valid_L(a, spec) or -1}

    return _grid_map(row, product(cfg["delta"], cfg["mu"], cfg["L"]))


def cmd_energy(cfg):
    domain, _ = _domain_and_phi(cfg)
    if cfg["phi"]:
        shapes = [get_shape(p.strip()) for p in cfg["phi"].split(",")]
    else:
        shapes = [s for s in REGISTRY if s.domain.describe() == domain.describe()]
    if not shapes:
        raise UsageError(f"no registry shape function lives on {domain.describe()}; pass --phi")
    d = _dimension(cfg, domain)

    def rows(delta, mu, L, R):
        a, spec = make_aniso(delta), interface(mu)
        cyl = make_cylinder(domain, R, d, L)
        out = []
        for s in shapes:
            exact = ansatz_rayleigh(s, cyl, spec, a)
            closed = normalized_energy_closed_form(s, R, L, spec, a)
            out.append({"phi_id": s.id, "delta": delta, "mu": mu, "L": L, "R": R, "sites": cyl.n_sites,
                        "rayleigh": exact, "rayleigh_orthogonal": ansatz_rayleigh(s, cyl, spec, a, True),
                        "closed_form": closed,
                        "rel_error": abs(exact - closed) / closed if closed else float("nan")})
        return out

    nested = _grid_map(rows, product(cfg["delta"], cfg["mu"], cfg["L"], cfg["R"]))
    return [r for group in nested for r in group]


def cmd_exact_diag(cfg):
    max_sites = cfg["max-sites"]
    if cfg["sites"] is not None:
        cyl = chain_of(cfg["d"] or 2, cfg["sites"])
    else:
        domain = parse_shape(cfg["shape"])
        cyl = make_cylinder(domain, _single(cfg, "R"), _dimension(cfg, domain), _single(cfg, "L"))
    out = []
    for delta in cfg["delta"]:
        rep = kernel_dimension(cyl, make_aniso(delta), max_sites=max_sites, seed=cfg["seed"])
        log.info("|Lambda|=%d Delta=%g kernel=%d gamma1=%.6g", cyl.n_sites, delta,
                 rep.kernel_dimension, rep.gamma1)
        out.extend(rep.rows(cyl.n_sites, delta))
    return out


def cmd_error_report(cfg):
    if cfg["phi"] in (None, "all"):
        shapes = REGISTRY
    else:
        shapes = [get_shape(p.strip()) for p in cfg["phi"].split(",")]
    a, spec, L = make_aniso(_single(cfg, "delta")), interface(_single(cfg, "mu")), _single(cfg, "L")
    return _grid_map(lambda s, R: error_report_row(s, R, L, spec, a),
                     product(shapes, cfg["R"]))


def cmd_validate(cfg):
    from .validation import run_all

    return [c.row() for c in run_all(cfg["max-sites"], cfg["seed"])]


HANDLERS = {"gap-bound": cmd_gap_bound, "g-scan": cmd_g_scan, "energy": cmd_energy,
            "exact-diag": cmd_exact_diag, "error-report": cmd_error_report,
            "validate": cmd_validate}
FIELDS = {"error-report": REPORT_FIELDS}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s", stream=sys.stderr)
        cfg = resolve(args)
        rows = HANDLERS[args.command](cfg)
        meta = {"seed": cfg["seed"], "config": {"command": args.command, **{
            k: ",".join(map(str, v)) if isinstance(v, list) else v
            for k, v in cfg.items() if k not in ("output", "format") and v is not None}}}
        emit_report(rows, cfg["format"], cfg["output"], meta=meta, fields=FIELDS.get(args.command))
    except (UsageError, ReportError, XXZError, ValueError) as exc:
        print(f"xxz-lab: error: {exc}", file=sys.stderr)
        return 1
    if args.command == "validate" and not all(r["passed"] for r in rows):
        failed = [r["check"] for r in rows if not r["passed"]]
        print(f"xxz-lab: validation failed: {'; '.join(failed)}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
