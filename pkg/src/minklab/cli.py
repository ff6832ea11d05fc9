"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
Flags beat MINKLAB_* environment variables, which beat built-in defaults.
Output is byte-identical across runs for identical configurations; wall-clock
metadata appears only behind --timestamp.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .analyzer import empirical_cdf, frequency_report
from .cfcore import (
    cf_to_code,
    cf_to_rational,
    format_rational,
    parse_cf,
    parse_rational,
    rational_to_cf,
)
from .qmark import qmark_cf, qmark_rational
from .streams import Checkpoint, DigitStream, champernowne_bits, leb128_encode, pack_bits, stream_for
from .trees import (
    OrderingId,
    count_words_with_sum,
    cumulative_bit_count,
    cumulative_digit_count,
    farey_level,
    iter_ordering,
    kepler_index,
    kepler_level,
    level_digit_count,
    q_of_n,
)

TREE_ORDERS = ("kepler", "farey", "kepler-perm")


class UsageError(Exception):
    pass


def _ordering_from_args(args) -> OrderingId:
    if args.order == "kepler-perm":
        if args.seed is None:
            raise UsageError("--order kepler-perm requires --seed")
        return OrderingId(args.order, args.seed)
    if args.seed is not None:
        raise UsageError("--seed is only meaningful with --order kepler-perm")
    return OrderingId(args.order)


def _parse_blocks(text: str) -> list[tuple[int, ...]]:
    try:
        return [tuple(int(t) for t in part.split(",")) for part in text.split(";") if part]
    except ValueError:
        raise UsageError(f"malformed block list: {text!r}") from None


def _parse_cutoffs(text: str) -> list[str]:
    body = text
    prefix = ""
    if ":" in text:
        prefix, body = text.split(":", 1)
        if prefix not in ("level", "digits"):
            raise UsageError(f"cutoff prefix must be 'level' or 'digits': {text!r}")
        prefix += ":"
    try:
        return [prefix + str(int(t)) for t in body.split(",")]
    except ValueError:
        raise UsageError(f"malformed cutoff list: {text!r}") from None


def _parse_xs(text: str) -> list[Fraction]:
    try:
        return [Fraction(t) for t in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed evaluation points: {text!r}") from None


def _default_format() -> str:
    fmt = os.environ.get("MINKLAB_FORMAT", "csv")
    return fmt if fmt in ("csv", "json") else "csv"


def _write_text(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_bytes(path: str | None, chunks):
    if path is None:
        for chunk in chunks:
            sys.stdout.buffer.write(chunk)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            for chunk in chunks:
                fh.write(chunk)


def _load_checkpoint(path: str | None) -> Checkpoint | None:
    if path is None:
        return None
    with open(path) as fh:
        return Checkpoint.from_text(fh.read())


def _gen_stream(args) -> DigitStream:
    checkpoint = _load_checkpoint(args.state_in)
    if args.format in ("bits", "packed-bits"):
        if args.order != "kepler":
            raise UsageError("bit output follows the path codes of the kepler order only")
        return champernowne_bits(checkpoint)
    return stream_for(_ordering_from_args(args), checkpoint)


def cmd_gen(args) -> int:
    bounds = [b is not None for b in (args.levels, args.max_den, args.count)]
    if sum(bounds) != 1:
        raise UsageError("exactly one of --levels, --max-den, --count is required")
    if args.max_den is not None and args.order != "aks":
        raise UsageError("--max-den applies to --order aks only")
    if args.levels is not None and args.order == "aks":
        raise UsageError("--order aks is bounded by --max-den, not --levels")
    if args.state_in or args.state_out:
        if args.count is None:
            raise UsageError("checkpointed runs need --count")
        if args.format == "rationals":
            raise UsageError("checkpoints apply to digit and bit output")

    if args.format == "rationals":
        order = _ordering_from_args(args)
        if args.levels is not None:
            n_words = (1 << (args.levels + 1)) - 1
        elif args.max_den is not None:
            n_words = args.max_den * (args.max_den - 1) // 2
        else:
            n_words = args.count
        it = iter_ordering(order)
        lines = (format_rational(cf_to_rational(next(it))) + "\n" for _ in range(n_words))
        _write_text(args.output, "".join(lines))
        return 0

    if args.count is not None:
        n_items = args.count
    elif args.max_den is not None:
        n_items = sum(len(rational_to_cf(Fraction(p, n)))
                      for n in range(2, args.max_den + 1) for p in range(1, n))
    elif args.format in ("bits", "packed-bits"):
        n_items = cumulative_bit_count(args.levels + 1)
    else:
        n_items = cumulative_digit_count(args.levels + 1)

    stream = _gen_stream(args)
    if args.format == "digits":
        _write_text(args.output, " ".join(str(d) for d in stream.take(n_items)) + "\n")
    elif args.format == "bits":
        _write_text(args.output, "".join(str(b) for b in stream.take(n_items)) + "\n")
    elif args.format == "leb128":
        _write_bytes(args.output, (leb128_encode(d) for d in stream.take(n_items)))
    elif args.format == "packed-bits":
        _write_bytes(args.output, [pack_bits(stream.take(n_items))])
    if args.state_out:
        with open(args.state_out, "w") as fh:
            fh.write(stream.checkpoint().to_text())
    return 0


def cmd_analyze(args) -> int:
    order = _ordering_from_args(args)
    blocks = _parse_blocks(args.blocks)
    cutoffs = _parse_cutoffs(args.cutoffs)
    stream = stream_for(order)
    report = frequency_report(stream, cutoffs, blocks, target=args.target,
                              threads=args.threads)
    if args.timestamp:
        report.meta["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    fmt = args.format or _default_format()
    _write_text(args.output, report.to_csv() if fmt == "csv" else report.to_json())
    if args.plot:
        from .plots import save_frequency_plots

        stem = os.path.splitext(os.path.basename(args.output))[0] if args.output else "report"
        for path in save_frequency_plots(report, args.plot, stem):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_qmark(args) -> int:
    if (args.rational is None) == (args.cf is None):
        raise UsageError("exactly one of --rational or --cf is required")
    if args.rational is not None:
        r = parse_rational(args.rational)
        value = qmark_rational(r)
    else:
        value = qmark_cf(parse_cf(args.cf))
    print(f"{value} = {value.decimal()}")
    return 0


def cmd_cdf(args) -> int:
    order = _ordering_from_args(args)
    xs = _parse_xs(args.xs)
    points = empirical_cdf(order, args.n, xs)
    targets = [qmark_rational(x).as_fraction() for x in xs]
    rows = [(x, emp, tgt, abs(float(emp - tgt))) for (x, emp), tgt in zip(points, targets)]
    fmt = args.format or _default_format()
    if fmt == "csv":
        lines = ["x,n,count,freq,target,abs_err"]
        lines += [f"{format_rational(x)},{args.n},{int(emp * args.n)},{float(emp)!r},"
                  f"{float(tgt)!r},{err!r}" for x, emp, tgt, err in rows]
        _write_text(args.output, "\n".join(lines) + "\n")
    else:
        doc = {
            "meta": {"tool": "minklab", "version": __version__, "order": order.kind,
                     "seed": order.seed, "n": args.n},
            "rows": [{"x": format_rational(x), "count": int(emp * args.n),
                      "freq": float(emp), "target": float(tgt), "abs_err": err}
                     for x, emp, tgt, err in rows],
        }
        if args.timestamp:
            doc["meta"]["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        _write_text(args.output, json.dumps(doc, indent=2) + "\n")
    if args.plot:
        from .plots import save_cdf_plot

        stem = os.path.splitext(os.path.basename(args.output))[0] if args.output else "cdf"
        print(f"wrote {save_cdf_plot(points, targets, args.plot, stem)}", file=sys.stderr)
    return 0


def _suite_counts(args) -> list[str]:
    fails = []
    for s in range(2, args.max_sum + 1):
        got = count_words_with_sum(s)
        expect = 1 << (s - 2)
        if got != expect:
            fails.append(f"composition count at sum {s}: {got} != {expect}")
        if s - 2 <= 20:
            tree = sum(1 for _ in kepler_level(s - 2))
            if got != tree:
                fails.append(f"level {s - 2} word count {tree} != composition count {got}")
    return fails


def _suite_bijection(args) -> list[str]:
    fails = []
    it = iter_ordering(OrderingId("kepler"))
    for n in range(1, args.max_n + 1):
        w = next(it)
        if q_of_n(n) != w:
            fails.append(f"closed-form word at {n}: {q_of_n(n)} != {w}")
            break
        if kepler_index(w) != n:
            fails.append(f"index of {w}: {kepler_index(w)} != {n}")
            break
    return fails


def _suite_codes(args) -> list[str]:
    bits = champernowne_bits()
    emitted = 0
    it = iter_ordering(OrderingId("kepler"))
    while emitted < args.max_bits:
        code = cf_to_code(next(it))
        for c in code:
            if emitted >= args.max_bits:
                break
            b = next(bits)
            if b != int(c):
                return [f"bit {emitted}: code gives {c}, counting stream gives {b}"]
            emitted += 1
    return []


def _suite_identities(args) -> list[str]:
    from .qmark import qmark_cf
    from .trees import farey_children, kepler_children

    fails = []
    ml = args.max_level
    words = []
    for l in range(min(ml, 12) + 1):
        words.extend(kepler_level(l))
    for w in words:
        left, right = kepler_children(w)
        half = qmark_cf(w).as_fraction() / 2
        if qmark_cf(left).as_fraction() != half:
            fails.append(f"halving identity fails at {w}")
            break
        if qmark_cf(right).as_fraction() != 1 - half:
            fails.append(f"reflection identity fails at {w}")
            break
    seen = sorted((cf_to_rational(w), qmark_cf(w).as_fraction()) for w in words)
    for (r1, q1), (r2, q2) in zip(seen, seen[1:]):
        if not q1 < q2:
            fails.append(f"monotonicity fails between {r1} and {r2}")
            break
    for l in range(min(ml, 20) + 1):
        total = sum(len(w) for w in kepler_level(l))
        if total != level_digit_count(l):
            fails.append(f"digit count at level {l}: {total} != {level_digit_count(l)}")
    for l in range(min(ml, 12) + 1):
        if sorted(farey_level(l)) != sorted(kepler_level(l)):
            fails.append(f"level {l} multisets differ between the two trees")
            break
    # spot-check the child rules agree with the rational forms
    for w in words[:256]:
        p, q = cf_to_rational(w).as_integer_ratio()
        kl, kr = kepler_children(w)
        if (cf_to_rational(kl), cf_to_rational(kr)) != (Fraction(p, p + q), Fraction(q, p + q)):
            fails.append(f"child rule disagrees with rational form at {w}")
            break
    return fails


_SUITES = {
    "counts": _suite_counts,
    "bijection": _suite_bijection,
    "codes": _suite_codes,
    "identities": _suite_identities,
}


def cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        fails = _SUITES[name](args)
        if fails:
            failed = True
            for msg in fails:
                print(f"FAIL {name}: {msg}")
        else:
            print(f"ok {name}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minklab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"minklab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_order(p):
        p.add_argument("--order", default="kepler",
                       choices=("kepler", "farey", "aks", "kepler-perm"))
        p.add_argument("--seed", type=int, default=None,
                       help="PRNG seed (kepler-perm only)")

    p = sub.add_parser("gen", help="write digits, bits, or rationals of an ordering")
    add_order(p)
    p.add_argument("--levels", type=int, default=None,
                   help="emit the complete levels 0..L")
    p.add_argument("--max-den", type=int, default=None,
                   help="largest denominator (aks order)")
    p.add_argument("--count", type=int, default=None,
                   help="emit exactly this many digits/bits/rationals")
    p.add_argument("--format", default="digits",
                   choices=("digits", "bits", "rationals", "leb128", "packed-bits"))
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--state-in", default=None, help="resume from a checkpoint file")
    p.add_argument("--state-out", default=None, help="write the end-of-run checkpoint")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="block-frequency report for an ordering")
    add_order(p)
    p.add_argument("--blocks", required=True,
                   help="semicolon-separated digit blocks, e.g. '1;2;1,2'")
    p.add_argument("--cutoffs", required=True,
                   help="'level:4,8' (first L levels), 'digits:100,200', or '100,200'")
    p.add_argument("--target", default="qmark", choices=("qmark", "gauss"))
    p.add_argument("--format", default=None, choices=("csv", "json"))
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default MINKLAB_THREADS or 1)")
    p.add_argument("--timestamp", action="store_true",
                   help="include wall-clock metadata in JSON output")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--plot", metavar="DIR", default=None,
                   help="also render figures into DIR")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("qmark", help="exact value of the question-mark function")
    p.add_argument("--rational", default=None, help="p/q in (0,1)")
    p.add_argument("--cf", default=None, help="digit list a1,a2,...,an")
    p.set_defaults(func=cmd_qmark)

    p = sub.add_parser("cdf", help="empirical distribution of an ordering")
    add_order(p)
    p.add_argument("-n", type=int, required=True, help="number of rationals")
    p.add_argument("--xs", required=True, help="evaluation points, e.g. '1/4,1/3,1/2'")
    p.add_argument("--format", default=None, choices=("csv", "json"))
    p.add_argument("--timestamp", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--plot", metavar="DIR", default=None)
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("verify", help="run structural identity suites")
    p.add_argument("--suite", default="all",
                   choices=("all", "counts", "bijection", "codes", "identities"))
    p.add_argument("--max-n", type=int, default=4096, help="bijection bound")
    p.add_argument("--max-bits", type=int, default=1 << 16, help="code/bit comparison bound")
    p.add_argument("--max-sum", type=int, default=16, help="composition enumeration bound")
    p.add_argument("--max-level", type=int, default=10, help="identity suite level bound")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
