"""Command-line front end: scan, verify, bench, stats, synth."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from . import bench as benchmod
from .charset import CharSetError, default_html_set, parse_charset
from .corpus import CorpusDoc, DensityOutOfRange, corpus_stats, generate_synthetic, load_corpus, parse_synth_spec
from .kernels import KernelId, UnknownKernel, resolve_backend
from .stream import all_matches
from .verify import verify_kernels

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--chars", default=None, help="target set, e.g. 'LT,CR,AMP,NUL' (default)")
    p.add_argument("--synth", action="append", default=[], metavar="SPEC",
                   help="synthetic corpus: length=<N>,density=<float>,seed=<u64> (repeatable)")
    p.add_argument("--backend", choices=("emulated", "vector", "vector-addp"), default=None,
                   help="force a kernel backend (default: vector when available)")
    p.add_argument("--json", action="store_true", help="machine-readable JSON output")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simdscan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    shared = _shared()
    kernels = ", ".join(k.value for k in KernelId)

    p = sub.add_parser("scan", parents=[shared], help="print match positions")
    p.add_argument("corpus", nargs="?", help="input file ('-' for stdin)")
    p.add_argument("--kernel", default="index64", help=f"one of: {kernels}")

    p = sub.add_parser("verify", parents=[shared], help="check every kernel against the scalar kernel")
    p.add_argument("corpus", nargs="*")
    p.add_argument("--kernel", default="all", help=f"'all' or one of: {kernels}")

    p = sub.add_parser("bench", parents=[shared], help="throughput of full match traversals")
    p.add_argument("corpus", nargs="*")
    p.add_argument("--kernel", default="all", help=f"'all' or one of: {kernels}")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument("--csv", action="store_true", help="CSV rows: " + ",".join(benchmod.CSV_COLUMNS))
    p.add_argument("--pin-cpu", action="store_true", help="pin to one logical CPU when the OS allows")
    p.add_argument("--hw-counters", action="store_true", help="instructions/byte and /cycle where available")

    p = sub.add_parser("stats", parents=[shared], help="bytes, matches and ratio per corpus")
    p.add_argument("corpus", nargs="*")
    p.add_argument("--csv", action="store_true")

    p = sub.add_parser("synth", parents=[shared], help="write a synthetic corpus")
    p.add_argument("-o", "--output", default="-", help="output file ('-' for stdout)")
    return parser


def _charset(args):
    return default_html_set() if args.chars is None else parse_charset(args.chars)


def _kernels(name: str):
    if name.lower() == "all":
        return list(KernelId)
    return [KernelId.parse(name)]


def _load(path: str) -> CorpusDoc:
    if path == "-":
        return CorpusDoc("<stdin>", sys.stdin.buffer.read(), "-")
    return load_corpus(path)


def _corpora(args, charset, paths) -> list[CorpusDoc]:
    docs = [_load(p) for p in paths]
    for spec in args.synth:
        docs.append(generate_synthetic(charset, parse_synth_spec(spec)))
    if not docs:
        raise UsageError("no corpus given: pass a file path or --synth")
    return docs


def cmd_scan(args, out) -> int:
    charset = _charset(args)
    kernel = KernelId.parse(args.kernel)
    docs = _corpora(args, charset, [args.corpus] if args.corpus else [])
    if len(docs) != 1:
        raise UsageError("scan takes exactly one corpus")
    positions = all_matches(charset, docs[0].data, kernel, resolve_backend(args.backend)).tolist()
    if args.json:
        json.dump(positions, out)
        out.write("\n")
    elif positions:
        out.write("\n".join(map(str, positions)) + "\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    charset = _charset(args)
    kernels = _kernels(args.kernel)
    backend = resolve_backend(args.backend)
    failed = False
    results = []
    for doc in _corpora(args, charset, args.corpus):
        checks = verify_kernels(charset, doc.data, kernels, backend)
        failed |= not all(c.ok for c in checks)
        if args.json:
            results.append({"corpus": doc.name, "backend": backend.name,
                            "kernels": [{"kernel": c.kernel, "ok": c.ok, "matches": c.matches,
                                         "divergence": c.divergence} for c in checks]})
        else:
            for c in checks:
                out.write(f"{doc.name}: {c.describe()}\n")
    if args.json:
        json.dump(results, out, indent=2)
        out.write("\n")
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_bench(args, out) -> int:
    if args.reps < 1 or args.warmup < 0:
        raise UsageError("--reps must be >= 1 and --warmup >= 0")
    charset = _charset(args)
    kernels = _kernels(args.kernel)
    docs = _corpora(args, charset, args.corpus)
    if args.pin_cpu:
        cpu = benchmod.pin_cpu()
        logging.getLogger(__name__).info("pinned to cpu %s", cpu)
    reports = []
    for doc in docs:
        reports += benchmod.run_bench(charset, doc, kernels, args.reps, args.warmup,
                                      resolve_backend(args.backend), args.hw_counters)
    if args.json:
        json.dump([r.as_dict() for r in reports], out, indent=2)
        out.write("\n")
    elif args.csv:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(benchmod.CSV_COLUMNS)
        writer.writerows(r.csv_row() for r in reports)
    else:
        out.write(f"{'kernel':<9} {'corpus':<28} {'bytes':>10} {'matches':>8} {'reps':>5} "
                  f"{'median ms':>10} {'GB/s':>8}  checksum\n")
        for r in reports:
            out.write(f"{r.kernel:<9} {r.corpus[:28]:<28} {r.bytes:>10} {r.matches:>8} {r.repetitions:>5} "
                      f"{r.median_s * 1e3:>10.4f} {r.throughput:>8.3f}  0x{r.checksum:016x}\n")
            if r.counters:
                extra = ", ".join(f"{k}={v:.3f}" if isinstance(v, float) else f"{k}={v}"
                                  for k, v in r.counters.items())
                out.write(f"{'':<9} {extra}\n")
    return EXIT_OK


def cmd_stats(args, out) -> int:
    charset = _charset(args)
    rows = [corpus_stats(charset, doc) for doc in _corpora(args, charset, args.corpus)]
    if args.json:
        json.dump([r.as_dict() for r in rows], out, indent=2)
        out.write("\n")
    elif args.csv:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["file", "bytes", "matches", "ratio"])
        writer.writerows([r.name, r.bytes, r.matches, f"{r.ratio:.6f}"] for r in rows)
    else:
        out.write(f"{'file':<28} {'bytes':>10} {'matches':>8} {'ratio':>7}\n")
        for r in rows:
            out.write(f"{r.name[:28]:<28} {r.bytes:>10} {r.matches:>8} {r.ratio * 100:>6.2f}%\n")
    return EXIT_OK


def cmd_synth(args, out) -> int:
    if len(args.synth) != 1:
        raise UsageError("synth takes exactly one --synth spec")
    doc = generate_synthetic(_charset(args), parse_synth_spec(args.synth[0]))
    if args.output == "-":
        out.flush()
        sys.stdout.buffer.write(doc.data)
        sys.stdout.buffer.flush()
    else:
        doc.save(args.output)
    return EXIT_OK


COMMANDS = {"scan": cmd_scan, "verify": cmd_verify, "bench": cmd_bench, "stats": cmd_stats, "synth": cmd_synth}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, CharSetError, UnknownKernel, DensityOutOfRange, ValueError) as exc:
        print(f"simdscan {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"simdscan {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except benchmod.VerificationError as exc:
        print(f"simdscan {args.command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
