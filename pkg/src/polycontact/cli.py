"""Command-line front end.

Exit status: 0 on success, 1 on usage or input errors, 2 when a check
subcommand finds an invariant violation. Data goes to ``--out`` or stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .census import CensusResult, enumerate_preimages, run_census
from .checks import consistency_check, kesten_check, transform_check_srw
from .contact import ContactMatrix, ContactRule
from .entropy import entropy_report, gamma_table
from .lattice import EnumerationBudgetError, WalkModel, enumerate_walks, format_walks, read_walks
from .montecarlo import (
    estimate_degeneracy_tail,
    estimate_mean_range,
    estimate_pattern_density,
    estimate_return_probability,
    estimate_small_range_prob,
)
from .patterns import BUILTIN_PATTERNS, find_free_4_loops, find_pattern_occurrences
from .schemas import SCHEMA_VERSION, validate_document
from .validation import check_rule

# execution-only settings; they never reach an output document
_NOT_PROVENANCE = {"func", "threads", "out"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_PROVENANCE}


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(doc: dict) -> str:
    validate_document(doc)
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _nonneg(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < 0:
            raise argparse.ArgumentTypeError(f"{name} must be >= 0")
        return v
    return conv


def _positive(name):
    def conv(text):
        v = _nonneg(name)(text)
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1")
        return v
    return conv


def _rule(args):
    if args.rule is None:
        return None
    if args.rule == "threshold":
        if args.threshold is None:
            raise UsageError("--rule threshold needs --threshold A")
        return ContactRule.threshold(args.threshold)
    return ContactRule.parse(args.rule)


def _add_rule(p):
    p.add_argument("--rule", choices=["coincidence", "adjacency", "threshold"], default=None)
    p.add_argument("--threshold", type=float, default=None, help="contact distance for --rule threshold")


def _add_model(p, default="srw"):
    p.add_argument("--model", choices=[m.value for m in WalkModel], default=default)


def _add_io(p):
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def _add_mc(p, length=True):
    p.add_argument("--dim", type=_positive("--dim"), default=2)
    if length:
        p.add_argument("--length", type=_nonneg("--length"), required=True)
    p.add_argument("--samples", type=_positive("--samples"), default=1000)
    p.add_argument("--seed", type=_nonneg("--seed"), default=0)
    p.add_argument("--threads", type=_positive("--threads"), default=1)
    _add_io(p)


# -- handlers ---------------------------------------------------------------


def cmd_census(args) -> int:
    census = run_census(args.model, args.dim, args.length, _rule(args), threads=args.threads,
                        max_walks=args.max_walks)
    if args.format == "csv":
        _emit(args, census.to_csv())
    else:
        _emit(args, _dump(census.to_dict(_config(args))))
    return 0


def _load_census(path) -> tuple[CensusResult, dict]:
    with open(path) as fh:
        doc = json.load(fh)
    validate_document(doc)
    return CensusResult.from_dict(doc), doc


def entropy_document(census: CensusResult, census_doc: dict, config: dict) -> dict:
    rep = entropy_report(census).to_dict()
    rep.pop("provenance")
    prov = {k: census_doc[k] for k in ("model", "dim", "N", "rule", "total_walks", "num_matrices")}
    if "config" in census_doc:
        prov["config"] = census_doc["config"]
    return {"schema_version": SCHEMA_VERSION, "kind": "entropy", "config": config, "census": prov, "report": rep}


def cmd_entropy(args) -> int:
    census, doc = _load_census(args.census)
    _emit(args, _dump(entropy_document(census, doc, _config(args))))
    return 0


def cmd_gamma_table(args) -> int:
    rows = gamma_table(args.model, args.dim, args.max_length, _rule(args), min_length=args.min_length,
                       threads=args.threads)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "W", "S", "S_C", "delta", "gamma"])
    for r in rows:
        w.writerow([r.N, r.W] + [repr(x + 0.0) for x in (r.S, r.S_C, r.delta, r.gamma)])
    _emit(args, buf.getvalue())
    return 0


def cmd_preimage(args) -> int:
    rule = check_rule(_rule(args), args.model)
    C = ContactMatrix.from_text(args.matrix, rule)
    walks = enumerate_preimages(C, args.dim, args.model, rule)
    R = len(set(walks[0].points)) if walks else None
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "preimage",
        "config": _config(args),
        "matrix": C.to_text(),
        "feasible": bool(walks),
        "count": len(walks),
        "range": R,
        "walks": [w.to_tokens() for w in walks],
    }
    _emit(args, _dump(doc))
    return 0


def cmd_walks(args) -> int:
    walks = list(enumerate_walks(args.model, args.dim, args.length, max_walks=args.max_walks))
    _emit(args, format_walks(walks))
    return 0


def cmd_patterns(args) -> int:
    walks = read_walks(args.walks)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["walk_index", "kind", "center_or_index"])
    for i, walk in enumerate(walks):
        if args.pattern == "free4":
            occs = find_free_4_loops(walk)
        else:
            occs = find_pattern_occurrences(walk, BUILTIN_PATTERNS[args.pattern])
        for occ in occs:
            w.writerow([i, args.pattern, occ.label])
    _emit(args, buf.getvalue())
    return 0


def _check_doc(args, ok: bool, results: dict) -> int:
    doc = {"schema_version": SCHEMA_VERSION, "kind": "check", "config": _config(args), "ok": ok, "results": results}
    _emit(args, _dump(doc))
    if not ok:
        print(f"{args.subcommand}: invariant violation", file=sys.stderr)
        return 2
    return 0


def cmd_transform_check(args) -> int:
    if args.model == "srw":
        res = transform_check_srw(args.dim, args.length, args.samples, args.seed)
    else:
        res = kesten_check(args.dim, args.length, model=args.model)
    return _check_doc(args, res["ok"], res)


def cmd_consistency_check(args) -> int:
    res = consistency_check(args.model, args.dim, args.length, _rule(args), threads=args.threads)
    return _check_doc(args, all(r["ok"] for r in res.values()), res)


def _estimate_doc(args, est) -> int:
    doc = {"schema_version": SCHEMA_VERSION, "kind": "estimate", "config": _config(args), **est.to_dict()}
    _emit(args, _dump(doc))
    return 0


def cmd_mc_range(args) -> int:
    return _estimate_doc(args, estimate_mean_range(args.dim, args.length, args.samples, args.seed,
                                                   n_jobs=args.threads))


def cmd_mc_pattern(args) -> int:
    return _estimate_doc(args, estimate_pattern_density(args.dim, args.length, args.pattern, args.samples,
                                                        args.seed, n_jobs=args.threads))


def cmd_mc_return(args) -> int:
    return _estimate_doc(args, estimate_return_probability(args.dim, args.steps, args.samples, args.seed))


def cmd_mc_smallrange(args) -> int:
    return _estimate_doc(args, estimate_small_range_prob(args.dim, args.length, args.epsilon, args.samples,
                                                         args.seed, n_jobs=args.threads))


def cmd_mc_degtail(args) -> int:
    return _estimate_doc(args, estimate_degeneracy_tail(args.dim, args.length, args.nu, args.samples,
                                                        args.seed, n_jobs=args.threads))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polycontact", description="Contact-matrix coarse graining of lattice walks.",
                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def new(name, func, help_):
        p = sub.add_parser(name, help=help_, allow_abbrev=False)
        p.set_defaults(func=func)
        return p

    p = new("census", cmd_census, "exhaustive contact-matrix census")
    _add_model(p)
    p.add_argument("--dim", type=_positive("--dim"), required=True)
    p.add_argument("--length", type=_nonneg("--length"), required=True)
    _add_rule(p)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--threads", type=_positive("--threads"), default=1)
    p.add_argument("--max-walks", type=_positive("--max-walks"), default=10**8)
    _add_io(p)

    p = new("entropy", cmd_entropy, "entropy report of a census file")
    p.add_argument("--census", required=True)
    _add_io(p)

    p = new("gamma-table", cmd_gamma_table, "CSV of W, S, S_C, delta, gamma against N")
    _add_model(p)
    p.add_argument("--dim", type=_positive("--dim"), required=True)
    p.add_argument("--max-length", type=_positive("--max-length"), required=True)
    p.add_argument("--min-length", type=_positive("--min-length"), default=1)
    _add_rule(p)
    p.add_argument("--threads", type=_positive("--threads"), default=1)
    _add_io(p)

    p = new("preimage", cmd_preimage, "all walks with a given contact matrix")
    p.add_argument("--matrix", required=True, help="text form 'M:hex', M = N+1")
    p.add_argument("--dim", type=_positive("--dim"), required=True)
    _add_model(p)
    _add_rule(p)
    _add_io(p)

    p = new("walks", cmd_walks, "write every walk of a model in the walk text format")
    _add_model(p)
    p.add_argument("--dim", type=_positive("--dim"), required=True)
    p.add_argument("--length", type=_nonneg("--length"), required=True)
    p.add_argument("--max-walks", type=_positive("--max-walks"), default=10**6)
    _add_io(p)

    p = new("patterns", cmd_patterns, "pattern and free-4-loop occurrences in a walk file")
    p.add_argument("--walks", required=True)
    p.add_argument("--pattern", choices=["q", "p", "free4"], required=True)
    _add_io(p)

    p = new("transform-check", cmd_transform_check, "check that rewrites preserve contact matrices")
    _add_model(p)
    _add_mc(p)

    p = new("consistency-check", cmd_consistency_check, "exact census and entropy identities")
    _add_model(p)
    p.add_argument("--dim", type=_positive("--dim"), required=True)
    p.add_argument("--length", type=_nonneg("--length"), required=True)
    _add_rule(p)
    p.add_argument("--threads", type=_positive("--threads"), default=1)
    _add_io(p)

    p = new("mc-range", cmd_mc_range, "Monte Carlo mean range")
    _add_mc(p)

    p = new("mc-pattern", cmd_mc_pattern, "Monte Carlo pattern density")
    p.add_argument("--pattern", choices=["q", "p"], required=True)
    _add_mc(p)

    p = new("mc-return", cmd_mc_return, "Monte Carlo return probability")
    p.add_argument("--steps", "--length", dest="steps", type=_nonneg("--steps"), required=True)
    _add_mc(p, length=False)

    p = new("mc-smallrange", cmd_mc_smallrange, "Monte Carlo P(R_N/N <= epsilon)")
    p.add_argument("--epsilon", type=float, required=True)
    _add_mc(p)

    p = new("mc-degtail", cmd_mc_degtail, "Monte Carlo certificate-based degeneracy tail")
    p.add_argument("--nu", type=float, required=True)
    _add_mc(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (UsageError, ValueError, EnumerationBudgetError, OSError) as exc:
        print(f"polycontact {args.subcommand}: error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
