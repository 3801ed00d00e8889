"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 validation error, 4 refusal (work ceiling),
5 non-convergence.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import capacity, games, lipschitz, nslp
from .entropy import Mac, Modulus, to_base
from .errors import MacapError, ParseError, ValidationError


def fmt(x) -> str:
    return f"{x:.12g}"


def _num(x):
    """Round to 12 significant digits so text and JSON reports agree."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(fmt(float(x)))
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    return x


# ---------------------------------------------------------------- file formats

def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def mac_from_dict(doc: dict, where: str = "<mac>") -> Mac:
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: top level must be an object")
    for key in ("d1", "d2", "dout", "transition"):
        if key not in doc:
            raise ParseError(f"{where}: missing key {key!r}")
    try:
        dims = tuple(int(doc[k]) for k in ("dout", "d1", "d2"))
        t = np.array(doc["transition"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: malformed numbers ({exc})") from exc
    if t.shape != dims:
        raise ValidationError(
            f"{where}: transition has shape {t.shape}, expected [dout][d1][d2] = {dims}")
    return Mac(t)


def parse_mac_file(path) -> Mac:
    return mac_from_dict(_load_json(path), str(path))


def mac_to_dict(mac: Mac) -> dict:
    # shortest round-trip float repr keeps the file exact
    return {"d1": mac.d1, "d2": mac.d2, "dout": mac.dout,
            "transition": mac.transition.tolist()}


def write_mac_file(mac: Mac, path) -> None:
    Path(path).write_text(json.dumps(mac_to_dict(mac)) + "\n")


def builtin_game(spec: str) -> games.NonlocalGame:
    parts = spec.split(":")
    name, args = parts[0], parts[1:]
    if name not in games.BUILTINS:
        raise ParseError(f"unknown builtin game {name!r}; known: {', '.join(games.BUILTINS)}")
    try:
        iargs = [int(a) for a in args]
    except ValueError as exc:
        raise ParseError(f"builtin arguments must be integers: {spec!r}") from exc
    try:
        return games.BUILTINS[name](*iargs)
    except TypeError as exc:
        raise ParseError(f"wrong number of arguments for builtin {name!r}") from exc


def game_from_dict(doc: dict, where: str = "<game>") -> games.NonlocalGame:
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: top level must be an object")
    for key in ("players", "question_sizes", "answer_sizes", "winning"):
        if key not in doc:
            raise ParseError(f"{where}: missing key {key!r}")
    n = int(doc["players"])
    if n < 2:
        raise ValidationError(f"{where}: a nonlocal game needs at least 2 players, got {n}")
    qs, ans = list(doc["question_sizes"]), list(doc["answer_sizes"])
    if len(qs) != n or len(ans) != n:
        raise ValidationError(f"{where}: question_sizes/answer_sizes must list {n} sizes")
    pairs = []
    for k, entry in enumerate(doc["winning"]):
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ParseError(f"{where}: winning[{k}] must be [question-tuple, answer-tuple]")
        pairs.append((tuple(entry[0]), tuple(entry[1])))
    try:
        return games.NonlocalGame.from_pairs(qs, ans, pairs, promise=doc.get("promise"),
                                             name=doc.get("name", Path(where).stem))
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def parse_game_file(path) -> games.NonlocalGame:
    path = str(path)
    if path.startswith("builtin:"):
        return builtin_game(path[len("builtin:"):])
    return game_from_dict(_load_json(path), path)


# ---------------------------------------------------------------- commands

def _cmd_sum_capacity(args) -> dict:
    mac = parse_mac_file(args.mac)
    method = None if args.method == "auto" else args.method
    eps = None if (args.max_iter is not None and args.eps is None) else (args.eps or 0.01)
    rep = capacity.sum_capacity(mac, eps=eps, method=method, max_iter=args.max_iter,
                                threads=args.threads)
    return {"value": to_base(rep.value, args.base),
            "best_value": to_base(rep.value, args.base),
            "upper_bound": to_base(rep.upper_bound, args.base),
            "method": rep.method, "precision": rep.precision,
            "iterations": rep.iterations, "converged": rep.converged,
            "outer_point": rep.outer_point, "inner_point": rep.inner_point}


def _cmd_relaxed(args) -> dict:
    mac = parse_mac_file(args.mac)
    eps = args.eps or 1e-7
    v = capacity.relaxed_sum_capacity(mac, eps)
    return {"value": to_base(v, args.base), "upper_bound": to_base(v + eps, args.base),
            "precision": eps}


def _cmd_game_mac(args) -> dict:
    game = parse_game_file(args.game)
    mac = games.build_game_mac(game)
    if not isinstance(mac, Mac):
        raise ValidationError("MAC files describe two senders; this game has "
                              f"{game.players} players")
    if args.output:
        write_mac_file(mac, args.output)
    else:
        sys.stdout.write(json.dumps(mac_to_dict(mac)) + "\n")
    return {"game": game.name, "d1": mac.d1, "d2": mac.d2, "dout": mac.dout,
            "output": args.output or "-"}


def _omega(game, model: str, on_promise: bool = False) -> float:
    if model == "classical":
        return games.classical_winning_prob(game, on_promise=on_promise)[0]
    if model == "ns":
        return nslp.max_ns_winning_prob(game)[0]
    if model == "full-comm":
        return games.full_communication_winning_prob(game)
    raise ValidationError(f"unknown model {model!r}")


def _cmd_bound(args) -> dict:
    game = parse_game_file(args.game)
    if args.omega is not None:
        omega, source = args.omega, "given"
    elif args.quantum:
        key = game.name.split(":")[0]
        if key not in games.QUANTUM_VALUES:
            raise ValidationError(f"no stored quantum value for game {game.name!r}; use --omega")
        omega, source = games.QUANTUM_VALUES[key], "quantum-table"
    elif args.ns:
        omega, source = _omega(game, "ns"), "ns"
    else:
        omega, source = _omega(game, "classical"), "classical"
    v = games.correlation_bound(game.d, omega)
    return {"game": game.name, "d": game.d, "omega": omega, "omega_source": source,
            "value": to_base(v, args.base), "upper_bound": to_base(v, args.base)}


def _cmd_winning_prob(args) -> dict:
    game = parse_game_file(args.game)
    out = {"game": game.name, "model": args.model, "d": game.d}
    if args.model == "classical":
        omega, strat = games.classical_winning_prob(game, on_promise=args.on_promise)
        out["strategy"] = [list(s) for s in strat]
    elif args.model == "ns":
        omega = nslp.max_ns_winning_prob(game)[0]
    else:
        omega = games.full_communication_winning_prob(game)
    out["value"] = omega
    return out


TEST_FUNCTIONS = {
    # name: (function of x, Lipschitz constant w.r.t. l1, known max on the simplex)
    "sin_norm": (lambda x: math.sin(float(np.linalg.norm(x))), 1.0, math.sin(1.0)),
    "cubic_norm": (lambda x: (lambda r: -r ** 3 / 6 + r ** 2 / 4 - r / (6 * math.pi))(
        float(np.linalg.norm(x))), 1 + 1 / (6 * math.pi), None),
}


def _cubic_max() -> float:
    # stationary point of -r^3/6 + r^2/4 - r/(6 pi), inside [1/sqrt(d), 1] for d = 3
    r = (1 + math.sqrt(1 - 4 / (3 * math.pi))) / 2
    return -r ** 3 / 6 + r ** 2 / 4 - r / (6 * math.pi)


def _cmd_optimize(args) -> dict:
    f, L, true_max = TEST_FUNCTIONS[args.function]
    if true_max is None and args.dim == 3:
        true_max = _cubic_max()
    beta = Modulus.linear(L)
    eps = args.eps or 0.15
    if args.method == "grid":
        res = lipschitz.maximize_grid(f, beta, args.dim, eps, threads=args.threads)
    else:
        res = lipschitz.maximize_dense_curve(f, beta, args.dim, eps, max_iter=args.max_iter)
    return {"function": args.function, "method": args.method, "value": res.best_value,
            "upper_bound": res.upper_bound, "true_max": true_max,
            "iterations": res.iterations, "converged": res.converged,
            "best_point": np.asarray(res.best_point)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="macap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eps=True):
        if eps:
            sp.add_argument("--eps", type=float, default=None, help="target precision (nats)")
        sp.add_argument("--base", choices=("bits", "nats"), default="bits")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("sum-capacity", help="sum capacity of a two-sender MAC")
    sp.add_argument("mac")
    sp.add_argument("--method", default="auto",
                    choices=("auto", "piyavskii_shubert_d2", "grid", "dense_curve"))
    sp.add_argument("--max-iter", type=int, default=None,
                    help="stop after this many outer iterations and report a certified bound")
    common(sp)
    sp.set_defaults(run=_cmd_sum_capacity)

    sp = sub.add_parser("relaxed-capacity", help="capacity over joint input distributions")
    sp.add_argument("mac")
    common(sp)
    sp.set_defaults(run=_cmd_relaxed)

    sp = sub.add_parser("game-mac", help="write the MAC built from a two-player game")
    sp.add_argument("--game", required=True)
    sp.add_argument("-o", "--output", default=None)
    common(sp, eps=False)
    sp.set_defaults(run=_cmd_game_mac)

    sp = sub.add_parser("bound", help="upper bound on the correlation-assisted sum rate")
    sp.add_argument("--game", required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--omega", type=float, default=None)
    g.add_argument("--classical", action="store_true")
    g.add_argument("--ns", action="store_true")
    g.add_argument("--quantum", action="store_true")
    common(sp, eps=False)
    sp.set_defaults(run=_cmd_bound)

    sp = sub.add_parser("winning-prob", help="winning probability of a nonlocal game")
    sp.add_argument("--game", required=True)
    sp.add_argument("--model", choices=("classical", "ns", "full-comm"), default="classical")
    sp.add_argument("--on-promise", action="store_true",
                    help="classical value restricted to the promised questions")
    common(sp, eps=False)
    sp.set_defaults(run=_cmd_winning_prob)

    sp = sub.add_parser("optimize", help="maximize a test function over the simplex")
    sp.add_argument("--function", choices=sorted(TEST_FUNCTIONS), default="sin_norm")
    sp.add_argument("--method", choices=("grid", "dense_curve"), default="dense_curve")
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--max-iter", type=int, default=None)
    common(sp)
    sp.set_defaults(run=_cmd_optimize)
    return p


def render(report: dict, fmt_name: str) -> str:
    clean = {k: _num(v) for k, v in report.items()}
    if fmt_name == "json":
        return json.dumps(clean, sort_keys=True)
    lines = []
    for k, v in clean.items():
        if isinstance(v, float):
            v = fmt(v)
        elif isinstance(v, list):
            v = json.dumps(v)
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "eps", None) is not None and not args.eps > 0:
        print("error: --eps must be positive", file=sys.stderr)
        return ValidationError.exit_code
    t0 = time.perf_counter()
    try:
        report = args.run(args)
    except MacapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    report = {"command": args.command, **report}
    if args.command in ("sum-capacity", "relaxed-capacity", "bound"):
        report["base"] = args.base
    report["wall_time_s"] = time.perf_counter() - t0
    # game-mac without -o already used stdout for the MAC document
    out = sys.stderr if report.get("output") == "-" else sys.stdout
    print(render(report, args.format), file=out)
    return 0


def main() -> None:
    sys.exit(run())
