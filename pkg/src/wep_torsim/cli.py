"""Command-line entry point.

    wep-torsim <mode> --config <path> --out <dir> [--seed <u64>] [--threads <k>] [--verify]

Exit codes: 0 success, 2 configuration error, 3 numerical error, 4 I/O error.
``WEP_TORSIM_OUT`` in the environment overrides ``--out``.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from . import __version__
from .config import MODES, ConfigError, load_config
from .scenarios import ResultTable, run, verify_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4
OUT_ENV = "WEP_TORSIM_OUT"


def format_number(x: float) -> str:
    # repr is the shortest round-trip form and ignores the locale
    return repr(float(x))


def render_csv(table: ResultTable, base_meta: dict[str, str]) -> str:
    lines = [f"# {k}: {v}" for k, v in {**base_meta, "table": table.name, **table.metadata}.items()]
    lines.append(",".join(table.columns))
    lines.extend(",".join(format_number(x) for x in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def write_outputs(tables: list[ResultTable], out_dir: Path, base_meta: dict[str, str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    manifest = [f"# {k}: {v}" for k, v in base_meta.items()]
    for table in tables:
        text = render_csv(table, base_meta)
        path = out_dir / f"{table.name}.csv"
        path.write_text(text, encoding="utf-8", newline="\n")
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        manifest.append(f"{path.name} rows={len(table.rows)} columns={len(table.columns)} sha256={digest}")
        written.append(path)
    (out_dir / "manifest.txt").write_text("\n".join(manifest) + "\n", encoding="utf-8", newline="\n")
    return written


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wep-torsim", description="Quantum WEP torsion-balance simulations.")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", required=True, type=Path)
    ap.add_argument("--out", type=Path, default=None, help=f"output directory (overridden by ${OUT_ENV})")
    ap.add_argument("--seed", type=_u64, default=None, help="RNG seed, overrides the config value")
    ap.add_argument("--threads", type=_positive_int, default=1)
    ap.add_argument("--verify", action="store_true", help="recompute 1%% of rows and compare")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def main(argv: list[str] | None = None, environ: dict | None = None) -> int:
    import os

    environ = os.environ if environ is None else environ
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK

    out_dir = Path(environ[OUT_ENV]) if environ.get(OUT_ENV) else args.out
    if out_dir is None:
        print(f"error: no output directory (use --out or ${OUT_ENV})", file=sys.stderr)
        return EXIT_CONFIG

    try:
        cfg = load_config(args.config, args.mode)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_IO if exc.kind == "io" else EXIT_CONFIG

    try:
        tables = run(cfg, seed=args.seed, threads=args.threads)
        if args.verify:
            problems = [p for t in tables for p in verify_table(t)]
            if problems:
                for p in problems:
                    print(f"verify failed: {p}", file=sys.stderr)
                return EXIT_NUMERIC
    except ArithmeticError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    seed = args.seed if args.seed is not None else (cfg["montecarlo"]["seed"] if cfg.mode == "montecarlo" else None)
    base_meta = {
        "tool": "wep-torsim",
        "version": __version__,
        "mode": cfg.mode,
        "config_sha256": cfg.digest,
        "seed": "none" if seed is None else str(seed),
    }
    try:
        written = write_outputs(tables, out_dir, base_meta)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(path)
    if args.verify:
        print("verify: ok")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
