"""Command-line front end.

Subcommands: ``compress`` (one table), ``mask`` (build a care mask from an
observation file), ``batch`` (a directory of tables), ``verify`` (check a
plan file against table and mask).

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import math
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import emit, mask as maskmod, search, tableio, verify
from .errors import LutPackError, UsageError
from .model import CareMask

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2


def _add_compress_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--wout", type=int, default=None, help="output bit width (default: inferred)")
    p.add_argument("--exiguity", type=int, default=search.DEFAULT_EXIGUITY,
                   help="max dependency count for don't-care elimination eligibility")
    p.add_argument("--no-hbs", action="store_true", help="disable higher-bit splitting")
    p.add_argument("--no-ssc", action="store_true", help="disable self-similarity compression")
    p.add_argument("--no-dc", action="store_true", help="disable the don't-care optimization stage")
    p.add_argument("--min-tsize", type=int, default=None, help="smallest sub-table exponent to try")
    p.add_argument("--max-tsize", type=int, default=None, help="largest sub-table exponent to try")
    p.add_argument("--passes", type=int, default=1, help="don't-care reduction passes per configuration")
    p.add_argument("--pluts-k", type=int, default=search.DEFAULT_PLUT_INPUTS,
                   help="physical LUT input size for the cost estimate")
    p.add_argument("--max-win", type=int, default=tableio.DEFAULT_W_IN_CAP,
                   help="refuse tables with more address bits than this")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--json", action="store_true", help="machine-readable stdout report")


def _config_from_args(args) -> search.SearchConfig:
    in_range = None
    if args.min_tsize is not None or args.max_tsize is not None:
        if args.min_tsize is None or args.max_tsize is None:
            raise UsageError("--min-tsize and --max-tsize must be given together")
        in_range = (args.min_tsize, args.max_tsize)
    return search.SearchConfig(
        w_lb_in_range=in_range,
        exiguity=args.exiguity,
        use_similarity=not args.no_ssc,
        use_higher_bits=not args.no_hbs,
        use_dontcares=not args.no_dc,
        passes=args.passes,
        plut_inputs=args.pluts_k,
    )


def _load_table_and_mask(table_path: Path, mask_path: Path | None, args):
    table, notes = tableio.parse_table(
        table_path.read_text(), w_out=args.wout, w_in_cap=args.max_win
    )
    if mask_path is not None:
        care = maskmod.mask_from_text(mask_path.read_text())
        if len(care) != len(table.values):
            raise UsageError(
                f"mask {mask_path} has {len(care)} entries, table has "
                f"{len(table.values)}"
            )
    else:
        care = CareMask.all_care(table.w_in)
        notes.append("no mask given: all entries treated as cares")
    return table, care, notes


def _write_outputs(out_dir: Path, name: str, plan, report) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{name}.v").write_text(emit.emit_verilog(plan, name))
    (out_dir / f"{name}.plan").write_text(emit.emit_plan_file(plan, report))
    (out_dir / f"{name}.report").write_text(emit.render_report(report))


def cmd_compress(args) -> int:
    table, care, notes = _load_table_and_mask(args.table, args.mask, args)
    cfg = _config_from_args(args)
    plan, report = search.compress(table, care, cfg)
    report.notes.extend(notes)
    name = args.name or args.table.stem
    _write_outputs(args.out, name, plan, report)
    if args.json:
        sys.stdout.write(emit.render_report_json(report))
    else:
        sys.stdout.write(emit.render_report(report))
    return EXIT_OK


def cmd_mask(args) -> int:
    observed = maskmod.parse_observations(args.obs.read_text(), args.win)
    care = maskmod.mask_from_observations(args.win, observed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(maskmod.mask_to_text(care))
    frac = maskmod.care_fraction(care)
    if args.json:
        sys.stdout.write(
            '{"care_fraction": %.6f, "entries": %d}\n' % (frac, len(care))
        )
    else:
        print(f"wrote {args.out}: care fraction {frac:.4f} ({len(care)} entries)")
    return EXIT_OK


def cmd_verify(args) -> int:
    table, care, _notes = _load_table_and_mask(args.table, args.mask, args)
    plan, _report = emit.load_plan_file(args.plan.read_text())
    result = verify.verify_plan(table, care, plan)
    if args.json:
        sys.stdout.write(
            '{"ok": %s, "care_mismatches": %d, "changed_dontcares": %d, '
            '"total_checked": %d}\n'
            % (
                "true" if result.ok else "false",
                len(result.care_mismatches),
                result.changed_dontcares,
                result.total_checked,
            )
        )
    else:
        status = "PASS" if result.ok else "FAIL"
        print(
            f"{status}: {len(result.care_mismatches)} care mismatches, "
            f"{result.changed_dontcares} don't-care entries changed, "
            f"{result.total_checked} addresses checked"
        )
        for addr in result.care_mismatches[:20]:
            print(f"  mismatch at address 0x{addr:x}")
    return EXIT_OK if result.ok else EXIT_VERIFY_FAIL


def _batch_one(job) -> dict:
    """Compress one table; run in a worker process."""
    (table_path, mask_path, out_dir, cfg, wout, w_in_cap, compare) = job
    result = {"name": Path(table_path).stem, "error": None}
    try:
        table, notes = tableio.parse_table(
            Path(table_path).read_text(), w_out=wout, w_in_cap=w_in_cap
        )
        if mask_path is not None:
            care = maskmod.mask_from_text(Path(mask_path).read_text())
            if len(care) != len(table.values):
                raise UsageError("mask/table size mismatch")
        else:
            care = CareMask.all_care(table.w_in)
            notes = notes + ["no mask given: all entries treated as cares"]
        plan, report = search.compress(table, care, cfg)
        report.notes.extend(notes)
        name = result["name"]
        _write_outputs(Path(out_dir), name, plan, report)
        row = report.chosen_row
        result["bits"] = row.bits_total
        result["pluts"] = row.pluts
        result["ust_before"] = row.ust_before
        result["ust_after"] = row.ust_after
        if compare:
            _plan_ac, report_ac = search.compress(
                table, CareMask.all_care(table.w_in), cfg
            )
            result["bits_allcare"] = report_ac.chosen_row.bits_total
            result["pluts_allcare"] = report_ac.chosen_row.pluts
    except (LutPackError, OSError) as e:
        result["error"] = str(e)
    return result


def cmd_batch(args) -> int:
    tables = sorted(args.dir.glob("*.tbl"))
    if not tables:
        print(f"error: no tables found in {args.dir}", file=sys.stderr)
        return EXIT_USAGE
    cfg = _config_from_args(args)
    jobs = []
    for path in tables:
        mask_path = path.with_suffix(".mask")
        jobs.append(
            (
                str(path),
                str(mask_path) if mask_path.exists() else None,
                str(args.out),
                cfg,
                args.wout,
                args.max_win,
                args.compare,
            )
        )
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_batch_one, jobs))
    else:
        results = [_batch_one(job) for job in jobs]
    results.sort(key=lambda r: r["name"])

    failures = [r for r in results if r["error"]]
    successes = [r for r in results if not r["error"]]
    summary = {
        "tables": len(results),
        "failed": len(failures),
        "total_bits": sum(r["bits"] for r in successes),
        "total_pluts": sum(r["pluts"] for r in successes),
        "results": results,
    }
    if args.compare and successes:
        reductions = [
            100.0 * (1.0 - r["bits"] / r["bits_allcare"]) for r in successes
        ]
        for r, red in zip(successes, reductions):
            r["bits_reduction_pct"] = red
        ratios = [r["bits_allcare"] / r["bits"] for r in successes]
        geomean = math.exp(sum(math.log(x) for x in ratios) / len(ratios))
        summary["median_bits_reduction_pct"] = statistics.median(reductions)
        summary["geomean_bits_reduction_pct"] = 100.0 * (1.0 - 1.0 / geomean)

    if args.json:
        import json

        sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    else:
        print(f"batch: {len(successes)} ok, {len(failures)} failed")
        for r in successes:
            line = f"  {r['name']}: bits={r['bits']} pluts={r['pluts']}"
            if "bits_reduction_pct" in r:
                line += (
                    f" allcare_bits={r['bits_allcare']}"
                    f" reduction={r['bits_reduction_pct']:.2f}%"
                )
            print(line)
        for r in failures:
            print(f"  {r['name']}: FAILED: {r['error']}")
        print(f"total bits: {summary['total_bits']}")
        print(f"total estimated pluts: {summary['total_pluts']}")
        if "median_bits_reduction_pct" in summary:
            print(
                f"bit-cost reduction vs all-care: median "
                f"{summary['median_bits_reduction_pct']:.2f}%, geomean "
                f"{summary['geomean_bits_reduction_pct']:.2f}%"
            )
    return EXIT_USAGE if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lutpack",
        description="Compress lookup tables into bias/unique-sub-table "
        "decompositions, exploiting don't-care entries, and emit Verilog.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress a single table")
    p.add_argument("--table", type=Path, required=True, help="table file (one hex value per line)")
    p.add_argument("--mask", type=Path, default=None, help="care mask file (default: all cares)")
    p.add_argument("--name", default=None, help="output base name / Verilog module name")
    _add_compress_flags(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("mask", help="build a care mask from observed inputs")
    p.add_argument("--obs", type=Path, required=True, help="observation file (one address per line)")
    p.add_argument("--win", type=int, required=True, help="address bit width")
    p.add_argument("--out", type=Path, required=True, help="mask file to write")
    p.add_argument("--json", action="store_true", help="machine-readable stdout")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("batch", help="compress every *.tbl in a directory")
    p.add_argument("--dir", type=Path, required=True, help="directory of .tbl (+ optional .mask) files")
    p.add_argument("--compare", action="store_true",
                   help="also run all-care mode and report the reduction")
    p.add_argument("--threads", type=int, default=1, help="parallel workers")
    _add_compress_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("verify", help="check a plan file against table and mask")
    p.add_argument("--table", type=Path, required=True)
    p.add_argument("--mask", type=Path, default=None)
    p.add_argument("--plan", type=Path, required=True)
    p.add_argument("--wout", type=int, default=None)
    p.add_argument("--max-win", type=int, default=tableio.DEFAULT_W_IN_CAP)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LutPackError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
