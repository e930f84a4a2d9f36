from typing import Any, Callable, Dict, List, Optional
import argparse
from argparse import Namespace
from pathlib import Path
import sys

from . import arithmetic
from . import configs
from . import engine
from . import group_maps
from . import growth
from . import relations
from .errors import ConfigError, RelationError
from .tree import check_path, parse_vertex, render_vertex
from .util import dump_json
from .words import Word, parse_word

EX_OK = 0
EX_NONTRIVIAL = 1
EX_UNKNOWN = 2
EX_USAGE = 64
EX_DATAERR = 65
EX_SOFTWARE = 70
EX_CONFIG = 78


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


def _common() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", type=Path, default=None)
    parser.add_argument("--preset", type=str, default=None, choices=sorted(configs.PRESETS))
    parser.add_argument("--seq", type=str, default=None, help="comma separated primes")
    parser.add_argument("--auto-extend", action="store_true", default=None)
    parser.add_argument("--budget", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", "-j", type=int, default=None)
    parser.add_argument("--progress", action="store_true", default=None)
    return parser


def get_args(argv: Optional[List[str]] = None) -> Namespace:
    common = _common()
    parser = _Parser(prog="branchcalc")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def word_command(name: str, *words: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common])
        for w in words:
            p.add_argument(w, type=str)
        p.add_argument("--word-level", dest="word_level", type=int, default=0)
        return p

    p = word_command("eval", "word")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--dot", action="store_true")
    p = word_command("act", "word", "vertex")
    word_command("equal", "w1", "w2")
    word_command("trivial", "word")
    p = word_command("stab", "word")
    p.add_argument("--level", dest="stab_level", type=int, required=True)
    p = word_command("abelianize", "word")
    p.add_argument("--B", dest="in_b", action="store_true")
    word_command("spines", "word")
    p = sub.add_parser("relation", parents=[common])
    p.add_argument("g1", type=str)
    p.add_argument("g2", type=str)
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)
    p = sub.add_parser("growth", parents=[common])
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--csv", type=Path, default=None)
    p = sub.add_parser("compositions", parents=[common])
    p.add_argument("--check", action="store_true")
    p.add_argument("--index", type=int, default=0)
    p = sub.add_parser("identities", parents=[common])
    p.add_argument("--depth", type=int, default=None)
    p = sub.add_parser("witness", parents=[common])
    p.add_argument("--rank", type=int, required=True)
    p = sub.add_parser("primes", parents=[common])
    p.add_argument("--next", dest="next_of", type=str, default=None)
    p.add_argument("--test", dest="test_of", type=str, default=None)
    p = sub.add_parser("validate", parents=[common])
    p.add_argument("--growth-hypothesis", action="store_true")
    p.add_argument("--free-subgroup-hypothesis", action="store_true")
    return parser.parse_args(argv)


def make_config(args: Namespace) -> Namespace:
    overrides: Dict[str, Any] = {
        "auto_extend": args.auto_extend,
        "default_budget": args.budget,
        "seed": args.seed,
        "threads": args.threads,
        "progress": args.progress,
    }
    if args.seq is not None:
        overrides["sequence"] = [x.strip() for x in args.seq.split(",") if x.strip()]
    if getattr(args, "depth", None) is not None:
        overrides["default_depth"] = args.depth
    if getattr(args, "max_rounds", None) is not None:
        overrides["max_rounds"] = args.max_rounds
    return configs.load_config(args.preset, args.config, overrides)


def _word(text: str, args: Namespace, cfg: Namespace) -> Word:
    return parse_word(text, getattr(args, "word_level", 0), cfg.seq)


def _verdict_exit(verdict: engine.TriState) -> int:
    if verdict.is_trivial:
        return EX_OK
    return EX_NONTRIVIAL if verdict.is_nontrivial else EX_UNKNOWN


def cmd_eval(args: Namespace, cfg: Namespace) -> int:
    p = engine.portrait(_word(args.word, args, cfg), cfg.default_depth, cfg.seq)
    print(dump_json(p.to_dict()))
    if args.dot:
        print(engine.portrait_to_dot(p))
    return EX_OK


def cmd_act(args: Namespace, cfg: Namespace) -> int:
    v = check_path(cfg.seq, parse_vertex(args.vertex), args.word_level)
    print(render_vertex(engine.act(_word(args.word, args, cfg), v, cfg.seq)))
    return EX_OK


def _report_verdict(w: Word, verdict: engine.TriState, cfg: Namespace) -> int:
    out = verdict.to_dict()
    if verdict.witness is not None:
        out["confirmed"] = engine.confirm_witness(w, verdict.witness, cfg.seq)
    print(dump_json(out))
    return _verdict_exit(verdict)


def cmd_trivial(args: Namespace, cfg: Namespace) -> int:
    w = _word(args.word, args, cfg)
    return _report_verdict(w, engine.decide_trivial(w, cfg.seq, cfg.default_budget), cfg)


def cmd_equal(args: Namespace, cfg: Namespace) -> int:
    u, v = _word(args.w1, args, cfg), _word(args.w2, args, cfg)
    w = u * ~v
    return _report_verdict(w, engine.decide_equal(u, v, cfg.seq, cfg.default_budget), cfg)


def cmd_stab(args: Namespace, cfg: Namespace) -> int:
    w = _word(args.word, args, cfg)
    result = engine.in_level_stabilizer(w, args.stab_level, cfg.seq)
    print(dump_json({"level": args.stab_level, "stabilizer": result}))
    return EX_OK


def cmd_abelianize(args: Namespace, cfg: Namespace) -> int:
    w = _word(args.word, args, cfg)
    if args.in_b:
        print(dump_json({"abB": [str(x) for x in group_maps.ab_B(w, cfg.seq)]}))
    else:
        print(dump_json(group_maps.ab_G(w, cfg.seq).to_dict()))
    return EX_OK


def cmd_spines(args: Namespace, cfg: Namespace) -> int:
    print(dump_json(group_maps.spine_estimate(_word(args.word, args, cfg), cfg.seq).to_dict()))
    return EX_OK


def cmd_relation(args: Namespace, cfg: Namespace) -> int:
    g1, g2 = parse_word(args.g1, 0, cfg.seq), parse_word(args.g2, 0, cfg.seq)
    try:
        _, report = relations.find_relation(
            g1, g2, cfg.seq, cfg.default_budget, cfg.max_rounds, cfg.default_depth
        )
    except RelationError as e:
        print(dump_json({"error": str(e), "diagnostics": e.diagnostics}), file=sys.stderr)
        return EX_SOFTWARE
    print(dump_json(report))
    return EX_OK


def cmd_growth(args: Namespace, cfg: Namespace) -> int:
    if args.radius > cfg.max_radius:
        raise ValueError(f"Radius {args.radius} exceeds max_radius {cfg.max_radius}.")
    census = growth.ball_sizes(
        cfg.seq, args.radius, cfg.default_budget, cfg.threads, cfg.progress
    )
    if args.csv is not None:
        growth.census_to_csv(census, args.csv)
    print(dump_json(census.to_dict()))
    return EX_OK


def cmd_compositions(args: Namespace, cfg: Namespace) -> int:
    if args.check:
        report = growth.check_words_length_prop(
            cfg.seq, args.index, cfg.default_budget, cfg.threads, cfg.progress
        )
        print(dump_json(report))
        return EX_OK if report["status"] == "pass" else EX_NONTRIVIAL
    l = cfg.seq.prime(args.index)
    count = sum(1 for _ in growth.composition_words(l, args.index))
    print(dump_json({"l": l, "count": count, "bound": growth.lower_bound_value(l)}))
    return EX_OK


def cmd_identities(args: Namespace, cfg: Namespace) -> int:
    results = group_maps.run_identity_suite(
        cfg.seq, cfg.default_depth, cfg.default_budget, cfg.seed, cfg.threads, cfg.progress
    )
    print(dump_json(group_maps.suite_to_dicts(results)))
    statuses = {r.status for r in results}
    if "fail" in statuses:
        return EX_NONTRIVIAL
    return EX_UNKNOWN if "inconclusive" in statuses else EX_OK


def cmd_witness(args: Namespace, cfg: Namespace) -> int:
    report = growth.abelian_witness(cfg.seq, args.rank, cfg.default_budget)
    print(dump_json(report))
    return EX_OK if report["status"] == "pass" else EX_NONTRIVIAL


def cmd_primes(args: Namespace, cfg: Namespace) -> int:
    out: Dict[str, Any] = {}
    if args.next_of is not None:
        out["next"] = str(arithmetic.next_prime(int(args.next_of), cfg.mr_rounds))
    if args.test_of is not None:
        out["prime"] = arithmetic.is_probable_prime(int(args.test_of), cfg.mr_rounds)
    if not out:
        raise ValueError("primes needs --next or --test")
    print(dump_json(out))
    return EX_OK


def cmd_validate(args: Namespace, cfg: Namespace) -> int:
    seq = cfg.seq
    out: Dict[str, Any] = {
        "sequence": arithmetic.validate_sequence(seq.values, cfg.mr_rounds).to_dict()
    }
    if args.growth_hypothesis:
        out["growth"] = [
            arithmetic.check_growth_hypothesis(seq, i, cfg.digit_budget).to_dict()
            for i in range(len(seq))
        ]
    if args.free_subgroup_hypothesis:
        out["freeSubgroup"] = [
            arithmetic.check_free_subgroup_hypothesis(seq, i, cfg.digit_budget).to_dict()
            for i in range(1, len(seq))
        ]
    print(dump_json(out))
    return EX_OK


HANDLERS: Dict[str, Callable[[Namespace, Namespace], int]] = {
    "eval": cmd_eval,
    "act": cmd_act,
    "equal": cmd_equal,
    "trivial": cmd_trivial,
    "stab": cmd_stab,
    "abelianize": cmd_abelianize,
    "spines": cmd_spines,
    "relation": cmd_relation,
    "growth": cmd_growth,
    "compositions": cmd_compositions,
    "identities": cmd_identities,
    "witness": cmd_witness,
    "primes": cmd_primes,
    "validate": cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = get_args(argv)
    try:
        cfg = make_config(args)
    except ConfigError as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EX_CONFIG
    try:
        return HANDLERS[args.command](args, cfg)
    except (ValueError, LookupError) as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return EX_DATAERR
