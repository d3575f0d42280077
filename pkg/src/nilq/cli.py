"""Command-line front-end.

Thin adapters only: every subcommand parses arguments, calls one library
function, and serializes the result.  Machine-readable output (JSON or CSV)
goes to stdout; one-line human summaries go to stderr.  Exit codes: 0 on
success, 1 on a domain error (reported as a JSON object on stdout), 2 on
usage or input-syntax errors.  Stochastic commands require an explicit seed
(no wall-clock default) and all outputs echo the resolved configuration.

`--jobs` is accepted for interface compatibility; execution is sequential,
which yields identical results by the no-shared-state aggregation contract.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import diophantine, presentation, randwalk
from .nilpotent2 import MalcevElement, from_word, format_element
from .words import WordSyntaxError, parse_word
from .presentation import InconclusiveError


class _UsageError(Exception):
    pass


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc


def _read_json(path: str):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{path} is not valid JSON: {exc}") from exc


def _load_presentation(path: str) -> presentation.NormalizedPresentation:
    try:
        p = presentation.parse_presentation(_read_text(path))
    except (ValueError, WordSyntaxError) as exc:
        raise _UsageError(f"{path}: {exc}") from exc
    return presentation.normalize(p)


def _emit(text: str, summary: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    print(summary, file=sys.stderr)


def _emit_json(obj, summary: str):
    _emit(json.dumps(obj, sort_keys=True, indent=2), summary)


def _element_jsonable(el: MalcevElement) -> dict:
    return {"alpha": list(el.alpha), "gamma": list(el.gamma)}


def _infer_m(text: str) -> int:
    m = 1
    digits = ""
    for ch in text + " ":
        if ch.isdigit():
            digits += ch
        else:
            if digits:
                m = max(m, int(digits))
            digits = ""
    return m


def _cmd_classify(args) -> int:
    np_ = _load_presentation(args.file)
    report = presentation.classify(np_)
    _emit_json(report.to_jsonable(), f"regime {report.regime} (rank {report.rank})")
    return 0


def _cmd_normalize(args) -> int:
    np_ = _load_presentation(args.file)
    from .words import format_word

    out = {
        "m": np_.m,
        "s": np_.s,
        "r": np_.r,
        "rank": np_.snf.rank,
        "rank_full": np_.rank_full,
        "alphas": list(np_.alphas),
        "invariant_factors": list(np_.snf.invariant_factors),
        "c_parts": [_element_jsonable(c) for c in np_.c_parts],
        "extra_commutator_relators": [
            _element_jsonable(h) for h in np_.extra_commutator_relators
        ],
        "closure_lattice": [list(v) for v in np_.closure_lattice],
        "rewritten_relators": [format_word(w) for w in np_.rewritten.relators],
        "nielsen_log": np_.nielsen_log.to_jsonable(),
    }
    _emit_json(out, f"normalized {np_.r} relators over m={np_.m}, rank {np_.snf.rank}")
    return 0


def _cmd_is_trivial(args) -> int:
    np_ = _load_presentation(args.file)
    try:
        w = parse_word(args.word, np_.m)
    except WordSyntaxError as exc:
        raise _UsageError(f"word: {exc}") from exc
    # the word is over the original generators; the deciders work in the
    # rewritten basis
    h = presentation.express_in_normalized_basis(w, np_)
    out = {
        "word": args.word,
        "trivial_in_G": presentation.is_trivial_in_G(h, np_),
        "trivial_mod_torsion": presentation.is_trivial_mod_torsion(h, np_),
    }
    _emit_json(out, f"trivial_in_G={out['trivial_in_G']}")
    return 0


def _cmd_word_eval(args) -> int:
    m = args.m if args.m is not None else _infer_m(args.word)
    try:
        w = parse_word(args.word, m)
    except WordSyntaxError as exc:
        raise _UsageError(f"word: {exc}") from exc
    el = from_word(w)
    out = {
        "m": m,
        "alpha": list(el.alpha),
        "gamma": list(el.gamma),
        "normal_form": format_element(el),
    }
    _emit_json(out, f"normal form: {out['normal_form']}")
    return 0


def _experiment_config(path: str) -> randwalk.ExperimentConfig:
    data = _read_json(path)
    try:
        return randwalk.ExperimentConfig(
            m=data["m"],
            r=data["r"],
            lengths=tuple(data["lengths"]),
            trials=data["trials"],
            seed=data["seed"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise _UsageError(f"bad experiment config: {exc}") from exc


def _cmd_rank_exp(args) -> int:
    cfg = _experiment_config(args.config)
    rows = randwalk.rank_experiment(cfg)
    if args.format == "json":
        payload = {
            "config": cfg.to_jsonable(),
            "rows": [
                {
                    "length": r.length,
                    "trials": r.trials,
                    "full_rank_count": r.full_rank_count,
                    "p_hat": [r.p_hat.numerator, r.p_hat.denominator],
                    "stderr": r.stderr,
                }
                for r in rows
            ],
        }
        _emit_json(payload, f"{len(rows)} lengths, seed {cfg.seed}")
    else:
        _emit(randwalk.rank_experiment_csv(cfg, rows), f"{len(rows)} lengths, seed {cfg.seed}")
    return 0


def _cmd_clt(args) -> int:
    summary = randwalk.coordinate_clt_stats(args.m, args.n, args.trials, args.seed)
    if args.format == "json":
        _emit_json(summary.to_jsonable(), f"variances {summary.variances}")
    else:
        _emit(randwalk.clt_csv(summary), f"variances {summary.variances}")
    return 0


def _cmd_escape(args) -> int:
    ns = args.n
    estimates = [
        randwalk.escape_probability(args.m, n, args.trials, args.seed, args.epsilon)
        for n in ns
    ]
    if args.format == "json":
        _emit_json([e.to_jsonable() for e in estimates], f"{len(estimates)} grid points")
    else:
        _emit(randwalk.escape_csv(estimates), f"{len(estimates)} grid points")
    return 0


def _cmd_return_prob(args) -> int:
    exact = None
    if args.float:
        exact = False
    table = randwalk.return_probability_exact(args.m, args.n_max, exact=exact)
    _emit(
        randwalk.return_table_csv(table),
        f"m={table.m} n_max={table.n_max} exact={table.exact}",
    )
    return 0


def _cmd_slope(args) -> int:
    fit = randwalk.decay_slope(args.m, (args.n_lo, args.n_hi))
    if args.format == "json":
        _emit_json(fit.to_jsonable(), f"slope {fit.slope:.4f}")
    else:
        cfg = {"m": fit.m, "n_lo": fit.n_lo, "n_hi": fit.n_hi}
        lines = [
            "# config: " + json.dumps(cfg, sort_keys=True),
            "m,n_lo,n_hi,slope,intercept",
            f"{fit.m},{fit.n_lo},{fit.n_hi},{fit.slope!r},{fit.intercept!r}",
        ]
        _emit("\n".join(lines), f"slope {fit.slope:.4f}")
    return 0


def _cmd_sz_check(args) -> int:
    res = randwalk.schwartz_zippel_check(args.r, args.m, args.b)
    if args.format == "json":
        _emit_json(res.to_jsonable(), f"zeros {res.zero_count} <= bound {res.bound}")
    else:
        cfg = {"b": res.box_halfwidth, "m": res.m, "r": res.r}
        lines = [
            "# config: " + json.dumps(cfg, sort_keys=True),
            "r,m,b,total,degree,zero_count,bound,holds",
            f"{res.r},{res.m},{res.box_halfwidth},{res.total},{res.degree},"
            f"{res.zero_count},{res.bound},{str(res.holds).lower()}",
        ]
        _emit("\n".join(lines), f"zeros {res.zero_count} <= bound {res.bound}")
    return 0


def _ring_system(path: str) -> diophantine.RingSystem:
    data = _read_json(path)
    try:
        return diophantine.RingSystem.from_jsonable(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise _UsageError(f"bad ring system: {exc}") from exc


def _ambient(args) -> diophantine.FreeNilpotentAmbient:
    if getattr(args, "presentation", None):
        return diophantine.QuotientAmbient(_load_presentation(args.presentation))
    return diophantine.FreeNilpotentAmbient(args.m)


def _cmd_compile(args) -> int:
    S = _ring_system(args.ring)
    compiled = diophantine.compile_system(diophantine.z_in_g_templates(), S)
    _emit_json(
        compiled.system.to_jsonable(),
        f"{len(compiled.system.variables)} group variables, "
        f"{len(compiled.system.equations)} equations",
    )
    return 0


def _cmd_solve_bounded(args) -> int:
    data = _read_json(args.system)
    if "constants" in data:
        try:
            S = diophantine.GroupSystem.from_jsonable(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise _UsageError(f"bad group system: {exc}") from exc
        ambient = _ambient(args)
        sols = diophantine.bounded_solve_group(
            S, ambient, args.box, find_all=not args.first, eval_limit=args.limit
        )
        payload = {
            "kind": "group",
            "box": args.box,
            "solutions": [
                {name: _element_jsonable(el) for name, el in sol.items()} for sol in sols
            ],
        }
    else:
        try:
            S = diophantine.RingSystem.from_jsonable(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise _UsageError(f"bad ring system: {exc}") from exc
        ring_sols = diophantine.bounded_solve_ring(S, args.box)
        payload = {"kind": "ring", "box": args.box, "solutions": ring_sols}
    _emit_json(payload, f"{len(payload['solutions'])} solutions within box {args.box}")
    return 0


def _cmd_verify(args) -> int:
    S = _ring_system(args.ring)
    ambient = _ambient(args)
    report = diophantine.verify_correspondence(
        S,
        diophantine.z_in_g_templates(),
        ambient,
        args.box_ring,
        args.box_group,
        eval_limit=args.limit,
    )
    _emit_json(report.to_jsonable(), "correspondence ok" if report.ok else "COUNTEREXAMPLES")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nilq",
        description="2-step nilpotent groups: presentations, walks, equation compilation.",
    )
    ap.add_argument("--jobs", type=int, default=1, help="accepted for compatibility; runs sequentially")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="regime report for a presentation file")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("normalize", help="normal form, Nielsen log, closure lattice")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_normalize)

    p = sub.add_parser("is-trivial", help="word-problem query against a presentation")
    p.add_argument("file")
    p.add_argument("word")
    p.set_defaults(fn=_cmd_is_trivial)

    p = sub.add_parser("word-eval", help="Malcev coordinates and normal form of a word")
    p.add_argument("word")
    p.add_argument("--m", type=int, default=None, help="rank (default: inferred from the word)")
    p.set_defaults(fn=_cmd_word_eval)

    p = sub.add_parser("rank-exp", help="full-rank frequency experiment (CSV)")
    p.add_argument("config", help="JSON file with m, r, lengths, trials, seed")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(fn=_cmd_rank_exp)

    p = sub.add_parser("clt", help="coordinate CLT statistics (CSV)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(fn=_cmd_clt)

    p = sub.add_parser("escape", help="escape-probability estimates (CSV)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, action="append", required=True, help="repeatable")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=None, help="threshold override (default ln n)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(fn=_cmd_escape)

    p = sub.add_parser("return-prob", help="exact return-probability table (CSV)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--float", action="store_true", help="force the float engine")
    p.set_defaults(fn=_cmd_return_prob)

    p = sub.add_parser("slope", help="log-log decay slope of the return probability")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n-lo", type=int, required=True)
    p.add_argument("--n-hi", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(fn=_cmd_slope)

    p = sub.add_parser("sz-check", help="exhaustive Schwartz-Zippel zero count")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(fn=_cmd_sz_check)

    p = sub.add_parser("compile", help="compile a ring system to a group system")
    p.add_argument("ring", help="ring system JSON file")
    p.set_defaults(fn=_cmd_compile)

    p = sub.add_parser("solve-bounded", help="exhaustive bounded solving (ring or group JSON)")
    p.add_argument("system", help="system JSON file")
    p.add_argument("--box", type=int, required=True)
    p.add_argument("--m", type=int, default=2, help="rank of the free ambient (group systems)")
    p.add_argument("--presentation", default=None, help="quotient ambient presentation file")
    p.add_argument("--first", action="store_true", help="stop at the first solution")
    p.add_argument("--limit", type=int, default=20_000_000)
    p.set_defaults(fn=_cmd_solve_bounded)

    p = sub.add_parser("verify", help="two-directional compiler correspondence check")
    p.add_argument("ring", help="ring system JSON file")
    p.add_argument("--box-ring", type=int, required=True)
    p.add_argument("--box-group", type=int, required=True)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--presentation", default=None)
    p.add_argument("--limit", type=int, default=20_000_000)
    p.set_defaults(fn=_cmd_verify)

    return ap


_DOMAIN_ERRORS = (
    InconclusiveError,
    randwalk.ResourceLimitError,
    randwalk.EnumerationLimitError,
    diophantine.SearchSpaceError,
)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.fn(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _DOMAIN_ERRORS as exc:
        _emit_json({"error": type(exc).__name__, "message": str(exc)}, f"domain error: {exc}")
        return 1
    except ValueError as exc:
        _emit_json({"error": "ValueError", "message": str(exc)}, f"domain error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
