"""Command-line drivers: diophlab {count, pairs, rho, roots, weyl, et-check, constant, report}."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import __version__
from .arith import lemma_sum_payoff, lemma_sum_sqrt2
from .constant import chain_check, constant_C, u_integral
from .equidist import CSV_COLUMNS, cancellation_report
from .erdos_turan import TargetSequence, et_bound, random_instance
from .errors import BoundViolation, DiophlabError, DomainError, NumericError, ResourceError
from .quadruples import REPORT_COLUMNS, asymptotic_report, count_pairs
from .roots import T2M1, parse_poly, rho_bound_check, rho_fast, root_count_prefix, roots_mod
from .store import Store, canonical, digest

log = logging.getLogger("diophlab")

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(DiophlabError):
    pass


def parse_int(text: str) -> int:
    """Integer from '120', '1_000_000', '1e12' or '2.5e6'; rejects non-integral values."""
    try:
        value = Decimal(str(text).replace("_", ""))
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_finite() or value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def parse_grid(text: str) -> list[int]:
    return [parse_int(t) for t in text.split(",") if t.strip()]


@dataclass
class RunConfig:
    subcommand: str
    x: list[int] = field(default_factory=list)
    y: list[int] = field(default_factory=list)
    poly: Optional[str] = None
    m: Optional[int] = None
    h_max: int = 5
    H: int = 10
    output_format: str = "csv"
    output_path: Optional[str] = None
    cache_dir: Optional[str] = None
    worker_count: int = 1
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(v < 1 for v in self.x + self.y):
            raise UsageError("bounds must be positive")
        if self.worker_count < 1:
            raise UsageError("--workers must be at least 1")
        if self.h_max < 1 or self.H < 1:
            raise UsageError("--h-max and --H must be positive")

    def config_hash(self) -> str:
        """Hash of everything that determines the output content."""
        keep = {k: v for k, v in asdict(self).items()
                if k not in ("output_path", "cache_dir", "worker_count", "output_format")}
        return digest(canonical(keep))[:16]


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, complex):
        return repr(v)
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render(cfg: RunConfig, columns: Iterable[str], rows: list[dict]) -> str:
    columns = list(columns)
    if cfg.output_format == "json":
        head = {"type": "header", "version": __version__, "command": cfg.subcommand,
                "seed": cfg.seed, "config_hash": cfg.config_hash()}
        lines = [json.dumps(head, sort_keys=True)]
        for row in rows:
            rec = {"type": "row", **{c: _jsonable(row.get(c)) for c in columns}}
            lines.append(json.dumps(rec, sort_keys=True))
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    buf.write(f"# diophlab {__version__} command={cfg.subcommand} seed={cfg.seed} "
              f"config={cfg.config_hash()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def emit(cfg: RunConfig, columns, rows) -> None:
    text = render(cfg, columns, rows)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)


def _store(cfg: RunConfig) -> Optional[Store]:
    return Store.from_env(cfg.cache_dir)


def _poly(cfg: RunConfig):
    if not cfg.poly:
        raise UsageError("--poly c2,c1,c0 is required")
    return parse_poly(cfg.poly)


# --- commands -----------------------------------------------------------------

def cmd_count(cfg: RunConfig) -> int:
    if not cfg.x:
        raise UsageError("count needs --x or --grid")
    reports = asymptotic_report(cfg.x, cfg.worker_count, _store(cfg))
    emit(cfg, REPORT_COLUMNS, [r.row() for r in reports])
    return EXIT_OK


def cmd_pairs(cfg: RunConfig) -> int:
    if not cfg.x:
        raise UsageError("pairs needs --x or --grid")
    rows = []
    for x in cfg.x:
        n = count_pairs(x)
        rows.append({"x": x, "pairs": n, "asymptotic": 6 / math.pi**2 * x * math.log(x)})
    emit(cfg, ("x", "pairs", "asymptotic"), rows)
    return EXIT_OK


def cmd_rho(cfg: RunConfig) -> int:
    f = _poly(cfg)
    if cfg.m is None:
        raise UsageError("rho needs --m")
    ms = range(1, cfg.m + 1) if cfg.extra.get("table") else [cfg.m]
    rows = [{"m": m, "rho": rho_fast(f, m), "bound_ok": rho_bound_check(f, m)} for m in ms]
    if not all(r["bound_ok"] for r in rows):
        emit(cfg, ("m", "rho", "bound_ok"), rows)
        return EXIT_ASSERT
    emit(cfg, ("m", "rho", "bound_ok"), rows)
    return EXIT_OK


def cmd_roots(cfg: RunConfig) -> int:
    f = _poly(cfg)
    if cfg.m is None:
        raise UsageError("roots needs --m")
    rs = roots_mod(f, cfg.m)
    emit(cfg, ("m", "root"), [{"m": cfg.m, "root": r} for r in rs.roots])
    return EXIT_OK


def cmd_weyl(cfg: RunConfig) -> int:
    f = _poly(cfg)
    if not cfg.y:
        raise UsageError("weyl needs --y or --grid")
    rep = cancellation_report(f, cfg.y, cfg.h_max, cfg.worker_count)
    emit(cfg, CSV_COLUMNS, [r.as_dict() for r in rep.rows])
    return EXIT_OK


def cmd_et_check(cfg: RunConfig) -> int:
    rows = []
    if cfg.extra.get("file"):
        try:
            obj = json.loads(Path(cfg.extra["file"]).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read instance file: {exc}") from exc
        instances = [TargetSequence.from_json(o) for o in (obj if isinstance(obj, list) else [obj])]
    elif cfg.extra.get("random"):
        rng = np.random.default_rng(cfg.seed)
        instances = [random_instance(rng, int(rng.integers(1, cfg.extra.get("n_max", 2000) + 1)))
                     for _ in range(cfg.extra["random"])]
    else:
        raise UsageError("et-check needs --file or --random")
    status = EXIT_OK
    for i, T in enumerate(instances):
        try:
            rep = et_bound(T, cfg.H)
            row = rep.row()
        except BoundViolation as exc:
            log.error("instance %d: %s", i, exc)
            row = {"N": T.N, "H": cfg.H, "holds": False}
            status = EXIT_ASSERT
        rows.append({"instance": i, **row})
    emit(cfg, ("instance", "N", "H", "Z_N", "D_N", "V_alpha", "V_beta", "bound", "monotone_rhs", "holds"), rows)
    return status


def cmd_constant(cfg: RunConfig) -> int:
    res = chain_check()
    rows = [{"name": "C", "value": constant_C()}, {"name": "u_integral", "value": u_integral()}]
    rows += [{"name": f"residual:{k}", "value": v} for k, v in res.items()]
    emit(cfg, ("name", "value"), rows)
    return EXIT_OK if max(res.values()) < 1e-8 else EXIT_ASSERT


def cmd_report(cfg: RunConfig) -> int:
    """Root-count and multiplicative-sum tables over a y grid."""
    ys = cfg.y or [10**k for k in range(3, 7)]
    prefix = root_count_prefix(T2M1, max(ys))
    rows = []
    for y in ys:
        S = int(prefix[y])
        ly = math.log(y)
        rows.append({
            "y": y, "S": S, "S_over_ylogy": S / (y * ly),
            "S_residual": (S - 6 / math.pi**2 * y * ly) / y,
            "sqrt2_ratio": lemma_sum_sqrt2(y) / ly ** math.sqrt(2),
            "payoff_ratio": lemma_sum_payoff(y) / y,
        })
    emit(cfg, ("y", "S", "S_over_ylogy", "S_residual", "sqrt2_ratio", "payoff_ratio"), rows)
    return EXIT_OK


COMMANDS = {
    "count": cmd_count, "pairs": cmd_pairs, "rho": cmd_rho, "roots": cmd_roots,
    "weyl": cmd_weyl, "et-check": cmd_et_check, "constant": cmd_constant, "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--cache", help="cache directory (DIOPHLAB_CACHE overrides)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--seed", type=parse_int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="diophlab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def bounds(p, name):
        p.add_argument(f"--{name}", type=parse_int, action="append", default=[])
        p.add_argument("--grid", type=parse_grid, help="comma-separated bounds")

    p = sub.add_parser("count", parents=[common], help="Q(x) with its asymptotic columns")
    bounds(p, "x")
    p = sub.add_parser("pairs", parents=[common], help="Diophantine pairs in [1, x]")
    bounds(p, "x")
    for name in ("rho", "roots"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--poly", required=True, help="coefficients c2,c1,c0")
        p.add_argument("--m", type=parse_int, required=True)
        if name == "rho":
            p.add_argument("--table", action="store_true", help="all m' <= m")
    p = sub.add_parser("weyl", parents=[common], help="R_f(h, y) cancellation table")
    p.add_argument("--poly", default="1,0,-1")
    p.add_argument("--h-max", type=int, default=5)
    bounds(p, "y")
    p = sub.add_parser("et-check", parents=[common], help="moving-target discrepancy bound")
    p.add_argument("--file")
    p.add_argument("--random", type=int)
    p.add_argument("--n-max", type=int, default=2000)
    p.add_argument("--H", type=int, default=10)
    sub.add_parser("constant", parents=[common], help="C and the identity chain")
    p = sub.add_parser("report", parents=[common], help="S(y) and multiplicative-sum tables")
    bounds(p, "y")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    grid = getattr(ns, "grid", None) or []
    extra = {k: getattr(ns, k) for k in ("table", "file", "random", "n_max") if getattr(ns, k, None)}
    return RunConfig(
        subcommand=ns.subcommand,
        x=list(getattr(ns, "x", [])) + (grid if hasattr(ns, "x") else []),
        y=list(getattr(ns, "y", [])) + (grid if hasattr(ns, "y") else []),
        poly=getattr(ns, "poly", None), m=getattr(ns, "m", None),
        h_max=getattr(ns, "h_max", 5), H=getattr(ns, "H", 10),
        output_format=ns.format, output_path=ns.out, cache_dir=ns.cache,
        worker_count=ns.workers, seed=ns.seed, extra=extra,
    )


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except ResourceError as exc:
        print(f"diophlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, DomainError) as exc:
        print(f"diophlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, NumericError) as exc:
        print(f"diophlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except OSError as exc:
        print(f"diophlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
