"""Command line front end: ``twocenter {norm,density,spectrum,potential,verify}``.

Every command writes a table (CSV or JSON) to ``--out`` or stdout.  CSV
files open with ``#`` comment lines carrying the model parameters, followed
by a header row and the data rows.  Floats are written with 10 significant
digits, so identical inputs give byte-identical files.

Parameters may come from a JSON config file (``--config``); flags given on
the command line override it.  Failures print a JSON object to stderr and
exit with a nonzero status.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import sys
from typing import Any

import numpy as np

from . import groundstates, model, spectrum, verify
from .errors import DivergenceError, TwoCenterError
from .geometry import CartesianPoint
from .model import ModelParams

__all__ = ["RunConfig", "build_config", "cmd_norm", "cmd_density", "cmd_spectrum",
           "cmd_potential", "cmd_verify", "main"]

COMMANDS = ("norm", "density", "spectrum", "potential", "verify")
_PARAM_KEYS = ("hbar", "delta", "wtype", "kappa", "c1", "c2", "a", "b")
LOG10_LINEAR_LIMIT = 300.0


@dataclasses.dataclass(frozen=True)
class RunConfig:
    command: str
    params: ModelParams
    grid: groundstates.Grid = groundstates.Grid()
    hbar_list: tuple = (1.0,)
    output_path: str | None = None
    format: str = "csv"
    sector: int | None = None
    kinds: tuple = ()
    bound: tuple | None = None
    normalize: bool = False
    nmax: int = spectrum.MAX_LEVEL
    workers: int | None = None
    seed: int = 12345
    quick: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise TwoCenterError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise TwoCenterError("format must be 'csv' or 'json'")
        if not self.hbar_list:
            raise TwoCenterError("hbar list must not be empty")
        if self.sector is not None and self.sector not in (0, 1, 2):
            raise TwoCenterError("sector must be 0, 1 or 2")


class Table:
    """Header plus rows of scalars, rendered deterministically."""

    def __init__(self, columns, rows, meta):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.meta = meta

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.meta.items():
            buf.write(f"# {key}: {_json_value(value)}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [{c: _json_cell(v) for c, v in zip(self.columns, r)} for r in self.rows]
        return json.dumps({"meta": self.meta, "columns": self.columns, "rows": rows},
                          indent=1, sort_keys=False) + "\n"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v + 0.0, ".10g")  # + 0.0 folds -0.0 into 0.0
    return str(v)


def _json_cell(v):
    if v is None or isinstance(v, (str, bool)):
        return v
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    if not math.isfinite(v):
        return _fmt(v)
    return float(format(v + 0.0, ".10g"))


def _json_value(v) -> str:
    return json.dumps(v, sort_keys=True)


def _meta(cfg: RunConfig, **extra) -> dict:
    meta = {"command": cfg.command, "params": dataclasses.asdict(cfg.params)}
    meta.update(extra)
    return meta


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _default_kinds(params: ModelParams):
    if params.wtype == "I":
        return ("bosonic_I", "fermionic_I")
    return groundstates.KINDS[2:]


def cmd_norm(cfg: RunConfig) -> Table:
    """Norm table, one row per ``(hbar, kind)``.

    Type I rows carry the analytic Bessel value and, alongside, the 2D
    quadrature value with their relative difference.  Type II rows come
    from quadrature; non-normalizable kinds are flagged ``divergent``.
    """
    columns = ["hbar", "kind", "log10_norm", "norm", "method", "error_estimate",
               "quadrature_log10_norm", "relative_difference", "status"]
    rows = []
    kinds = cfg.kinds or _default_kinds(cfg.params)
    for hb in cfg.hbar_list:
        params = dataclasses.replace(cfg.params, hbar=float(hb))
        for kind in kinds:
            state = groundstates.ground_state(kind, params)
            if params.wtype == "I":
                res = state.norm()
                quad = groundstates.norm_quadrature(state)
                diff = abs(math.expm1(quad.log_magnitude - res.log_magnitude))
                rows.append(_norm_row(hb, kind, res, "analytic", quad.log10_magnitude, diff, "ok"))
                continue
            try:
                res = state.norm()
            except DivergenceError:
                rows.append([float(hb), kind, None, None, "quadrature", None, None, None, "divergent"])
                continue
            rows.append(_norm_row(hb, kind, res, "quadrature", None, None, "ok"))
    return Table(columns, rows, _meta(cfg, hbar_list=[float(h) for h in cfg.hbar_list]))


def _norm_row(hb, kind, res, method, qlog, diff, status):
    lg = res.log10_magnitude
    linear = res.value if abs(lg) <= LOG10_LINEAR_LIMIT else None
    return [float(hb), kind, lg, linear, method, res.abs_error_estimate, qlog, diff, status]


def _density_state(cfg: RunConfig):
    if cfg.bound is not None:
        n, m, parity = cfg.bound
        sign = -1 if cfg.sector == 2 else 1
        return f"bound({n},{m},{'+' if sign > 0 else '-'},{parity})", \
            spectrum.assemble_bound_state(n, m, sign, parity, params=cfg.params)
    if cfg.kinds:
        kind = cfg.kinds[0]
    elif cfg.params.wtype == "I":
        kind = "fermionic_I" if cfg.sector == 1 else "bosonic_I"
    else:
        bos, fer = groundstates.normalizable_kinds_II(cfg.params)
        kind = fer if cfg.sector == 1 else bos
    return kind, groundstates.ground_state(kind, cfg.params)


def cmd_density(cfg: RunConfig) -> Table:
    """``|Psi|^2`` on the grid, one row per cell; center cells are flagged."""
    label, state = _density_state(cfg)
    dg = groundstates.density_grid(state, cfg.grid, normalize=cfg.normalize, workers=cfg.workers)
    X1, X2 = np.meshgrid(cfg.grid.x1, cfg.grid.x2)
    rows = [[float(a), float(b), None if f else float(d), bool(f)]
            for a, b, d, f in zip(X1.ravel(), X2.ravel(), dg.values.ravel(), dg.flagged.ravel())]
    return Table(["x1", "x2", "density", "flagged"], rows,
                 _meta(cfg, state=label, grid=dataclasses.asdict(cfg.grid), normalized=cfg.normalize))


def cmd_spectrum(cfg: RunConfig) -> Table:
    """QES levels.  Equal strengths give the full table with residuals;
    otherwise only the energies of both separated branches are listed."""
    params = cfg.params
    if params.delta != 1.0 or not params.is_simple:
        columns = ["n", "branch", "E", "threshold"]
        rows = []
        for n in range(cfg.nmax + 1):
            for branch, s in (("razavy_u", 1 + params.delta), ("wh_v", 1 - params.delta)):
                rows.append([n, branch, spectrum.qes_energy(branch, n, params), 2 * s * s / params.hbar**2])
        return Table(columns, rows, _meta(cfg))
    columns = ["n", "m", "sector", "parity", "null", "E", "I", "zeta", "M", "lambda", "a", "q",
               "normalizable", "u_residual", "razavy_residual", "v_residual"]
    u = np.linspace(1.05, 6.0, 30)
    x = 0.5 * np.arccosh(u)
    v = np.linspace(-0.95, 0.95, 30)
    rows = []
    for e in spectrum.spectrum_table(params, cfg.nmax):
        bs = spectrum.BoundState(e, params)
        null = bs.is_null()
        ur = spectrum.u_ode_residual(e.n, e.m, e.sector_sign, u, params)
        rr = spectrum.razavy_residual(e.n, e.m, e.sector_sign, x, params)
        vr = None if null else spectrum.v_ode_residual(e.n, e.m, e.sector_sign, e.parity, v, params)
        rows.append([e.n, e.m, "+" if e.sector_sign > 0 else "-", e.parity, null,
                     e.E, e.I, e.razavy.zeta, e.razavy.M, e.razavy.lam, e.mathieu.a, e.mathieu.q,
                     None if null else bs.normalizable, ur, rr, vr])
    return Table(columns, rows, _meta(cfg))


def cmd_potential(cfg: RunConfig) -> Table:
    """Sector potentials on the grid (``--sector 1`` gives the matrix entries)."""
    X1, X2 = np.meshgrid(cfg.grid.x1, cfg.grid.x2)
    x1, x2 = X1.ravel(), X2.ravel()
    r = np.minimum(np.hypot(x1 - 1, x2), np.hypot(x1 + 1, x2))
    bad = r <= 1e-12
    ok = ~bad
    p = CartesianPoint(x1[ok], x2[ok])
    sectors = (0, 2) if cfg.sector is None else (cfg.sector,)
    columns, values = ["x1", "x2"], []
    for s in sectors:
        if s == 1:
            columns += ["V11", "V12", "V22"]
            values += list(model.matrix_potential(p, cfg.params))
        else:
            columns.append(f"V{s}")
            values.append(model.potential(s, p, cfg.params))
    columns.append("flagged")
    full = []
    for vals in values:
        arr = np.full(x1.shape, np.nan)
        arr[ok] = vals
        full.append(arr)
    rows = []
    for i in range(x1.size):
        row = [float(x1[i]), float(x2[i])]
        row += [None if bad[i] else float(a[i]) for a in full]
        row.append(bool(bad[i]))
        rows.append(row)
    return Table(columns, rows, _meta(cfg, grid=dataclasses.asdict(cfg.grid)))


def cmd_verify(cfg: RunConfig) -> Table:
    results = verify.run_all(cfg.params, seed=cfg.seed, quick=cfg.quick)
    rows = [[r.name, r.passed, r.measured, r.tolerance, r.detail] for r in results]
    return Table(["check", "passed", "measured", "tolerance", "detail"], rows,
                 _meta(cfg, all_passed=all(r.passed for r in results)))


_DISPATCH = {"norm": cmd_norm, "density": cmd_density, "spectrum": cmd_spectrum,
             "potential": cmd_potential, "verify": cmd_verify}


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _floats(text: str):
    return tuple(float(t) for t in str(text).split(",") if t.strip())


def _parse_grid(value) -> groundstates.Grid:
    if isinstance(value, dict):
        return groundstates.Grid(**value)
    parts = list(value) if isinstance(value, (list, tuple)) else str(value).split(",")
    if len(parts) != 6:
        raise TwoCenterError("grid needs x1min,x1max,x2min,x2max,nx,ny")
    a, b, c, d = (float(t) for t in parts[:4])
    return groundstates.Grid(a, b, c, d, int(parts[4]), int(parts[5]))


def _parse_bound(value):
    parts = value if isinstance(value, (list, tuple)) else str(value).split(",")
    if len(parts) != 3:
        raise TwoCenterError("bound state needs n,m,parity")
    return int(parts[0]), int(parts[1]), str(parts[2]).strip()


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default values for any option")
    common.add_argument("--hbar", help="reduced Planck constant; a comma list for 'norm'")
    common.add_argument("--delta", type=float)
    common.add_argument("--kappa", type=float)
    common.add_argument("--wtype", choices=("I", "IIa", "IIb"))
    common.add_argument("--a", type=int, choices=(0, 1), help="Type II sign bit a")
    common.add_argument("--b", type=int, choices=(0, 1), help="Type II sign bit b")
    common.add_argument("--c1", type=float)
    common.add_argument("--c2", type=float)
    common.add_argument("--sector", type=int, choices=(0, 1, 2))
    common.add_argument("--grid", help="x1min,x1max,x2min,x2max,nx,ny")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int, help="threads for grids (default: $TWOCENTER_WORKERS)")

    p = argparse.ArgumentParser(prog="twocenter", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    n = sub.add_parser("norm", parents=[common], help="ground-state norm table")
    n.add_argument("--kind", action="append", choices=groundstates.KINDS)
    d = sub.add_parser("density", parents=[common], help="probability density on a grid")
    d.add_argument("--kind", action="append", choices=groundstates.KINDS)
    d.add_argument("--bound", help="equal-strength bound state n,m,parity (sector from --sector)")
    d.add_argument("--normalize", action="store_true", default=None)
    s = sub.add_parser("spectrum", parents=[common], help="QES spectrum table")
    s.add_argument("--nmax", type=int)
    sub.add_parser("potential", parents=[common], help="sector potentials on a grid")
    v = sub.add_parser("verify", parents=[common], help="run the self-checks")
    v.add_argument("--seed", type=int)
    v.add_argument("--quick", action="store_true", default=None)
    return p


_LIST_FLAGS = ("--grid", "--hbar", "--bound")


def _join_list_flags(argv):
    # "--grid -2,2,..." would read the value as an option; glue it on
    out, it = [], iter(argv)
    for tok in it:
        if tok in _LIST_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def build_config(argv=None) -> RunConfig:
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = _parser().parse_args(_join_list_flags(argv))
    opts: dict[str, Any] = {}
    if ns.config:
        with open(ns.config, encoding="utf-8") as fh:
            opts.update(json.load(fh))
    for key, value in vars(ns).items():
        if key not in ("config", "command") and value is not None:
            opts[key] = value

    hb = opts.pop("hbar", None)
    hbar_list = opts.pop("hbar_list", None)
    if hb is not None:
        hbar_list = _floats(hb) if isinstance(hb, str) else tuple(np.atleast_1d(hb).astype(float))
    hbar_list = tuple(float(h) for h in (hbar_list or (1.0,)))

    pkw = {k: opts.pop(k) for k in _PARAM_KEYS if k in opts}
    for k in ("delta", "kappa", "c1", "c2"):
        if k in pkw:
            pkw[k] = float(pkw[k])
    pkw["hbar"] = hbar_list[0]
    if pkw.get("wtype", "I") != "I" and "kappa" not in pkw:
        raise TwoCenterError("Type II needs --kappa")
    params = ModelParams(**pkw)

    kw: dict[str, Any] = {}
    if "grid" in opts:
        kw["grid"] = _parse_grid(opts.pop("grid"))
    if "kind" in opts:
        kinds = opts.pop("kind")
        kw["kinds"] = tuple([kinds] if isinstance(kinds, str) else kinds)
    if "bound" in opts:
        kw["bound"] = _parse_bound(opts.pop("bound"))
    if "out" in opts:
        kw["output_path"] = opts.pop("out")
    for key in ("format", "sector", "normalize", "nmax", "workers", "seed", "quick"):
        if key in opts:
            kw[key] = opts.pop(key)
    if opts:
        raise TwoCenterError(f"unknown option(s): {', '.join(sorted(opts))}")
    return RunConfig(command=ns.command, params=params, hbar_list=hbar_list, **kw)


def run(cfg: RunConfig) -> tuple[str, bool]:
    table = _DISPATCH[cfg.command](cfg)
    text = table.to_csv() if cfg.format == "csv" else table.to_json()
    ok = table.meta.get("all_passed", True)
    return text, ok


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
        text, ok = run(cfg)
    except (TwoCenterError, ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        diag = getattr(exc, "diagnostics", None)
        if diag:
            err["diagnostics"] = {k: _json_cell(v) if not isinstance(v, (list, dict)) else v
                                  for k, v in diag.items()}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 1
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 3


if __name__ == "__main__":
    sys.exit(main())
