"""Command-line front end.

Exit codes: 0 yes/success, 1 no/refuted/failed check, 2 unknown or budget
exhausted, 64 usage error, 70 internal error. With --json every result is one JSON object on
its own line carrying ``trace_v``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import corpora
from .coding import NotInImage, godel_code, godel_decode
from .elimination import (
    BudgetExhausted, Frontier, GroundProver, RefuterProver, Searcher, TruthTableProver,
    _graded_stream, _fast_path, quantifier_budget, toy_candidates,
)
from .fragments import NotExistential, classify, exists, fragment_stream
from .interpretations import (
    onesorted_map, residue_bridge, residue_map, toy_bridge, verify_bridge_axioms,
    verify_translation_laws,
)
from .limits import (
    FIELDS, decide_positive, decide_zero_char, split_membership, toy_family, uniform_via,
)
from .logic import (
    BUILTIN_SIGNATURES, L_O, L_RING, L_VAL, LogicError, print_canonical, parse_sentence,
    toy_signature,
)
from .models import (
    NotAField, evaluate, galois_field, is_prime, prime_field, propositional_model,
    structure_from_json, trivially_valued, zmod,
)
from .oracles import (
    EXACT, NO, UNKNOWN, YES, BudgetExceeded, NotPrime, OracleAnswer, ToyInstance,
    bounded_prime_check, decide_exists1_Q, decide_finite_field, fields_stratum, toy_oracles,
)

TRACE_VERSION = 1
EXIT = {YES: 0, NO: 1, UNKNOWN: 2}
USAGE = 64
INTERNAL = 70
DEFAULT_BUDGET = 10_000
CONFIG_KEYS = {"budget": int, "prime_bound": int, "battery": str, "seed": int,
               "step_cap": int, "corpus_size": int}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE)


# --------------------------------------------------------------------------
# Option parsing helpers


def read_config(path: str) -> dict:
    """key = value lines; # starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip(), value.strip().strip('"')
        if not eq or key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config line {raw!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}") from None
    return out


def _int_after(spec: str, prefix: str) -> int:
    try:
        return int(spec[len(prefix):])
    except ValueError:
        raise UsageError(f"bad number in {spec!r}") from None


def _signature(name: str):
    if name in BUILTIN_SIGNATURES:
        return BUILTIN_SIGNATURES[name]
    if name.startswith("toy:"):
        return toy_signature(_int_after(name, "toy:"))
    raise UsageError(f"unknown signature {name!r}")


def parse_model(spec: str, prime_bound: int = 7):
    """fp:<p>, zmod:<n>, gf:<q>, triv:<q>, toy:<k>:<atoms>, json:<path>."""
    head, _, rest = spec.partition(":")
    try:
        if head == "fp":
            p = int(rest)
            if not is_prime(p):
                raise UsageError(f"{p} is not prime")
            return prime_field(p)
        if head == "zmod":
            return zmod(int(rest))
        if head == "gf":
            return galois_field(int(rest))
        if head == "triv":
            return trivially_valued(galois_field(int(rest)))
        if head == "toy":
            k, _, atoms = rest.partition(":")
            true = [a for a in atoms.split(",") if a]
            return propositional_model(toy_signature(int(k)), true)
        if head == "json":
            return structure_from_json(Path(rest).read_text())
    except (ValueError, NotAField) as e:
        raise UsageError(f"bad model {spec!r}: {e}") from None
    raise UsageError(f"unknown model {spec!r}")


def parse_battery(spec: str):
    """Comma-free list of models separated by '+', or 'fields' / 'triv'."""
    if spec in ("fields", "triv"):
        qs = [2, 3, 4, 5, 7]
        return [parse_model(f"{'gf' if spec == 'fields' else 'triv'}:{q}") for q in qs]
    return [parse_model(part) for part in spec.split("+") if part]


def _bridge(spec: str):
    """toy:<k>[:perm digits] or residue."""
    if spec == "residue":
        return None
    if spec.startswith("toy:"):
        k, _, perm = spec[4:].partition(":")
        try:
            k = int(k)
            return toy_bridge(k, [int(c) for c in perm] if perm else None)
        except ValueError as e:
            raise UsageError(f"bad bridge {spec!r}: {e}") from None
    raise UsageError(f"unknown bridge {spec!r}")


def _prover(spec: str, battery):
    if spec == "tt":
        return TruthTableProver()
    if spec.startswith("ground:"):
        return GroundProver(_int_after(spec, "ground:"))
    if spec == "ground":
        return GroundProver()
    if spec.startswith("refute:"):
        return RefuterProver(parse_battery(spec[len("refute:"):]))
    raise UsageError(f"unknown prover {spec!r}")


# --------------------------------------------------------------------------
# Output


class Output:
    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def emit(self, command: str, payload: dict, text: str):
        if self.as_json:
            obj = {"trace_v": TRACE_VERSION, "command": command, **payload}
            self.stream.write(json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n")
        else:
            self.stream.write(text + "\n")

    def answer(self, command: str, ans: OracleAnswer, extra: dict | None = None) -> int:
        payload = {"verdict": ans.verdict, "soundness": ans.soundness,
                   "evidence": ans.evidence, "trace": list(ans.trace)}
        payload.update(extra or {})
        lines = [f"{ans.verdict} ({ans.soundness}) {ans.evidence}".rstrip()]
        for entry in ans.trace:
            if "note" in entry:
                lines.append(f"  step {entry['step']}: {entry['note']}")
            else:
                n = f", n={entry['n']}" if "n" in entry else ""
                lines.append(f"  step {entry['step']}: {entry['oracle']}({entry['query']}{n}) -> {entry['verdict']}")
        self.emit(command, payload, "\n".join(lines))
        return EXIT[ans.verdict]


# --------------------------------------------------------------------------
# Subcommands


def cmd_parse(args, out: Output, cfg) -> int:
    sig = _signature(args.sig)
    if args.decode is not None:
        try:
            s = godel_decode(args.decode, sig)
        except NotInImage:
            out.emit("parse", {"verdict": NO, "in_image": False}, "not a code")
            return 1
        text = print_canonical(s)
        out.emit("parse", {"verdict": YES, "in_image": True, "sentence": text}, text)
        return 0
    if args.sentence is None:
        raise UsageError("parse needs a sentence or --decode")
    s = parse_sentence(args.sentence, sig)
    text = print_canonical(s)
    code = godel_code(s)
    out.emit("parse", {"verdict": YES, "sentence": text, "code": str(code)},
             f"{text}\n{code}" if args.code else text)
    return 0


def cmd_classify(args, out: Output, cfg) -> int:
    s = parse_sentence(args.sentence, _signature(args.sig))
    flags = classify(s).flags()
    text = " ".join(f"{k}={str(v).lower() if isinstance(v, bool) else v}" for k, v in flags.items())
    out.emit("classify", {"verdict": YES, "sentence": print_canonical(s), "flags": flags}, text)
    return 0


def cmd_translate(args, out: Output, cfg) -> int:
    if args.map == "residue":
        tau, sig = residue_map(), L_RING
    else:
        tau, sig = onesorted_map(), L_O
    s = parse_sentence(args.sentence, sig)
    image = tau(s)
    # the image must live in the target language
    parse_sentence(print_canonical(image), L_VAL)
    text = print_canonical(image)
    out.emit("translate", {"verdict": YES, "map": args.map, "source": print_canonical(s),
                           "image": text}, text)
    return 0


def cmd_eval(args, out: Output, cfg) -> int:
    M = parse_model(args.model)
    s = parse_sentence(args.sentence, M.signature)
    value = evaluate(M, s)
    ans = OracleAnswer(YES if value else NO, EXACT, f"evaluated in {M.name}")
    return out.answer("eval", ans, {"model": M.name, "sentence": print_canonical(s)})


def _toy_decide(inst: ToyInstance, stratum: str):
    fam = toy_oracles(inst)
    if stratum in ("all", "sigma"):
        return fam.sigma
    if stratum == "0":
        return fam.sigma0
    if stratum == "pos":
        return fam.sigma_pos
    if stratum == "gg0":
        return fam.sigma_gg0
    if stratum.startswith("gt:"):
        m = _int_after(stratum, "gt:")
        return lambda f: fam.sigma_gt(f, m)
    if stratum.isdigit():
        n = int(stratum)
        return lambda f: fam.sigma_n(f, n)
    raise UsageError(f"unknown stratum {stratum!r}")


def cmd_decide(args, out: Output, cfg) -> int:
    spec = args.oracle
    if spec.startswith("toy:"):
        inst = ToyInstance(_int_after(spec, "toy:"))
        s = parse_sentence(args.sentence, inst.signature())
        ans = _toy_decide(inst, args.stratum)(s)
        return out.answer("decide", ans, {"oracle": spec, "sentence": print_canonical(s)})
    s = parse_sentence(args.sentence, L_RING)
    if spec.startswith("fp:"):
        ans = decide_finite_field(_int_after(spec, "fp:"), s)
    elif spec == "q-exists1":
        ans = decide_exists1_Q(s)
    elif spec.startswith("bounded-primes"):
        B = _int_after(spec, "bounded-primes:") if ":" in spec else cfg.get("prime_bound", 1000)
        ans = bounded_prime_check(s, B)
    elif spec == "fields-n":
        if args.n is None:
            raise UsageError("fields-n needs --n")
        ans = fields_stratum(s, args.n)
    else:
        raise UsageError(f"unknown oracle {spec!r}")
    return out.answer("decide", ans, {"oracle": spec, "sentence": print_canonical(s)})


ROLES = {"sigma": "sigma", "sigma0": "sigma0", "sigma>0": "pos", "pos": "pos",
         "sigma>>0": "gg0", "gg0": "gg0", "sigma'>0": "pos_sub", "pos-sub": "pos_sub",
         "sigmaN": "uniform", "uniform": "uniform"}


def _role_oracle(role: str, impl: str, cfg):
    """Callable for one oracle role from its implementation name."""
    if impl.startswith("toy:"):
        fam = toy_oracles(ToyInstance(_int_after(impl, "toy:")))
        table = {"sigma": fam.sigma, "sigma0": fam.sigma0, "pos": fam.sigma_pos,
                 "gg0": fam.sigma_gg0, "pos_sub": fam.sigma_pos, "uniform": fam.sigma_N}
        return table[role]
    if impl.startswith("bounded-primes") and role in ("pos", "gg0", "pos_sub"):
        B = _int_after(impl, "bounded-primes:") if ":" in impl else cfg.get("prime_bound", 1000)
        return lambda s: bounded_prime_check(s, B)
    if impl == "q-exists1" and role == "sigma0":
        return decide_exists1_Q
    if impl == "fields-n" and role == "uniform":
        return fields_stratum
    raise UsageError(f"oracle {impl!r} cannot serve as {role}")


def cmd_reduce(args, out: Output, cfg) -> int:
    chosen = {}
    for item in args.oracle or []:
        name, eq, impl = item.partition("=")
        if not eq or name not in ROLES:
            raise UsageError(f"bad --oracle {item!r}; expected <role>=<impl>")
        chosen[ROLES[name]] = impl
    toy_impls = [v for v in chosen.values() if v.startswith("toy:")]
    if toy_impls:
        inst = ToyInstance(_int_after(toy_impls[0], "toy:"))
        family, sig = toy_family(inst), inst.signature()
    else:
        family, sig = FIELDS, L_RING

    def need(role):
        if role in chosen:
            return _role_oracle(role, chosen[role], cfg)
        if toy_impls:
            return _role_oracle(role, toy_impls[0], cfg)
        raise UsageError(f"--alg {args.alg} needs an oracle for {role}")

    phi = parse_sentence(args.sentence, sig)
    cap = cfg.get("step_cap", args.cap)
    if args.alg == "split":
        ans = split_membership(phi, need("sigma0"), need("pos"))
    elif args.alg == "zero":
        ans = decide_zero_char(phi, need("sigma"), need("pos"), need("gg0"), family, cap)
    elif args.alg == "positive":
        ans = decide_positive(phi, need("gg0"), need("pos_sub"), need("uniform"), family, cap)
    else:
        if args.n is None:
            raise UsageError("--alg uniform needs --n")
        role = "pos" if args.via == "sigma>0" else "sigma"
        ans = uniform_via(phi, args.n, need(role), family, args.via)
    return out.answer("reduce", ans, {"alg": args.alg, "sentence": print_canonical(phi)})


def cmd_eliminate(args, out: Output, cfg) -> int:
    budget = cfg["budget"]
    tb = _bridge(args.bridge)
    battery_spec = args.battery or cfg.get("battery")
    if tb is not None:
        iota, T2, F1 = tb.interpretation, tb.bridge.c2.theory, tb.bridge.c1.fragment
        psi = parse_sentence(args.target, tb.sig2)
        candidates = toy_candidates(F1)
        battery = parse_battery(battery_spec) if battery_spec else tb.universe2
    else:
        B = residue_bridge()
        iota, T2 = residue_map(exists(L_RING)), B.c2.theory
        psi = parse_sentence(args.target, L_VAL)
        candidates = fragment_stream(B.c1.fragment)
        battery = parse_battery(battery_spec or "triv")
    prover = _prover(args.prover, battery)
    start = None
    if args.resume:
        start = Frontier.from_json(Path(args.resume).read_text())
    if args.fast_path and start is None:
        hit = _fast_path(psi, iota, T2, prover)
        if hit is not None:
            return _found(out, hit)
    if args.graded:
        candidates = _graded_stream(candidates, quantifier_budget(psi))
    searcher = Searcher(iota, candidates, T2, prover, battery)
    try:
        result = searcher.search(psi, budget, start)
    except BudgetExhausted as e:
        payload = {"status": "budget", "pairs_visited": e.frontier.pairs_visited,
                   "frontier": e.frontier.to_json()}
        if args.save_frontier:
            Path(args.save_frontier).write_text(json.dumps(e.frontier.to_json(), sort_keys=True))
        out.emit("eliminate", payload, f"budget exhausted after {e.frontier.pairs_visited} pairs")
        return 2
    return _found(out, result)


def _found(out: Output, result) -> int:
    payload = result.to_json()
    out.emit("eliminate", payload,
             f"{payload['candidate']}\npairs visited: {payload['pairs_visited']}")
    return 0


def cmd_verify(args, out: Output, cfg) -> int:
    n = cfg.get("corpus_size", args.count)
    tb = _bridge(args.bridge)
    if tb is not None:
        c1 = [s for s in corpora.literal_formulas([f"r{i}" for i in range(1, tb.k + 1)], args.depth)]
        c2 = [s for s in corpora.literal_formulas([f"s{i}" for i in range(1, tb.k + 1)], args.depth)]
        if len(c1) > n:
            import random
            rng = random.Random(args.seed)
            c1 = sorted(rng.sample(c1, n), key=print_canonical)
            c2 = sorted(rng.sample(c2, n), key=print_canonical)
        bridge, u1, u2, tau1, tau2 = tb.bridge, tb.universe1, tb.universe2, tb.interpretation, tb.inverse
    else:
        bridge = residue_bridge()
        u1 = [galois_field(q) for q in (2, 3, 4, 5, 7)]
        u2 = [trivially_valued(F) for F in u1]
        c1 = [s for s in corpora.ring_corpus(args.seed, n, 3, 2) if classify(s).exists]
        tau1, tau2 = residue_map(exists(L_RING)), None
        c2 = [tau1(s) for s in c1]
    results = []
    if args.laws in ("translation", "all"):
        results += verify_translation_laws(tau1, tau2, bridge.c1, bridge.c2, u1, u2, c1, c2)
    if args.laws in ("bridge", "all"):
        results += list(verify_bridge_axioms(bridge, u2, u1, c1, c2).values())
    ok = all(r.status == "pass" for r in results)
    lines = [f"{r.law}: {r.status} ({r.checked} checked)" + (f" witness {r.witness}" if r.witness else "")
             for r in results]
    out.emit("verify", {"verdict": YES if ok else NO, "bridge": args.bridge,
                        "results": [r.to_json() for r in results]}, "\n".join(lines))
    return 0 if ok else 1


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="one JSON object per result")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for every randomized corpus")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                        help="search budget (FF_BUDGET overrides)")
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="key=value file with default budgets, prime bounds, batteries")

    parser = _Parser(prog="archlogic", parents=[common],
                     description="Fragments, interpretations and oracle reductions for field theories.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", parents=[common], help="parse and print canonically")
    p.add_argument("sentence", nargs="?")
    p.add_argument("--sig", default="val-varpi")
    p.add_argument("--code", action="store_true", help="also print the Gödel code")
    p.add_argument("--decode", type=int, help="decode a natural number instead")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("classify", parents=[common], help="fragment membership flags")
    p.add_argument("sentence")
    p.add_argument("--sig", default="val-varpi")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("translate", parents=[common], help="apply an interpretation")
    p.add_argument("sentence")
    p.add_argument("--map", choices=["residue", "onesorted"], required=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("eval", parents=[common], help="truth in a finite structure")
    p.add_argument("sentence")
    p.add_argument("--model", required=True,
                   help="fp:<p> | zmod:<n> | gf:<q> | triv:<q> | toy:<k>:<atoms> | json:<path>")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("decide", parents=[common], help="ask one oracle")
    p.add_argument("sentence")
    p.add_argument("--oracle", required=True,
                   help="fp:<p> | q-exists1 | bounded-primes:<B> | fields-n | toy:<k>")
    p.add_argument("--n", type=int, help="stratum for fields-n")
    p.add_argument("--stratum", default="all",
                   help="toy only: all | 0 | <n> | gt:<m> | pos | gg0")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("reduce", parents=[common], help="run an oracle algorithm")
    p.add_argument("sentence")
    p.add_argument("--alg", choices=["split", "zero", "uniform", "positive"], required=True)
    p.add_argument("--oracle", action="append", metavar="ROLE=IMPL",
                   help="roles: sigma sigma0 sigma>0 sigma>>0 sigma'>0 sigmaN")
    p.add_argument("--n", type=int, help="stratum for --alg uniform")
    p.add_argument("--via", choices=["sigma", "sigma>0"], default="sigma")
    p.add_argument("--cap", type=int, default=10_000, help="step-2 search cap")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("eliminate", parents=[common], help="search for an elimination")
    p.add_argument("--target", required=True, help="the L2 sentence to eliminate")
    p.add_argument("--bridge", required=True, help="toy:<k>[:<perm>] | residue")
    p.add_argument("--prover", default="tt", help="tt | refute:<battery> | ground:<depth>")
    p.add_argument("--battery", help="models for candidate pre-filtering, joined by '+'")
    p.add_argument("--graded", action="store_true", help="keep e(candidate) <= e(target)")
    p.add_argument("--fast-path", action="store_true", help="try the syntactic preimage first")
    p.add_argument("--resume", help="frontier JSON file to resume from")
    p.add_argument("--save-frontier", help="write the frontier here on budget exhaustion")
    p.set_defaults(func=cmd_eliminate)

    p = sub.add_parser("verify", parents=[common], help="check translation laws and bridge axioms")
    p.add_argument("--bridge", default="toy:3")
    p.add_argument("--laws", choices=["translation", "bridge", "all"], default="all")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--count", type=int, default=200)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    saved = sys.stderr
    sys.stderr = stderr
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
        try:
            cfg = read_config(args.config) if getattr(args, "config", None) else {}
            args.json = getattr(args, "json", False)
            args.seed = getattr(args, "seed", cfg.get("seed", 0))
            budget = getattr(args, "budget", cfg.get("budget", DEFAULT_BUDGET))
            env = os.environ.get("FF_BUDGET")
            if env:
                try:
                    budget = int(env)
                except ValueError:
                    raise UsageError(f"FF_BUDGET is not an integer: {env!r}") from None
            cfg["budget"] = budget
            return args.func(args, Output(args.json, stdout), cfg)
        except (UsageError, LogicError, NotPrime, BudgetExceeded, NotExistential, OSError) as e:
            stderr.write(f"archlogic: error: {e}\n")
            return USAGE
        except Exception as e:  # keep crashes apart from a "no" verdict
            stderr.write(f"archlogic: internal error: {type(e).__name__}: {e}\n")
            return INTERNAL
    finally:
        sys.stderr = saved


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
