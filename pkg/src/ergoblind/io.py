"""JSON game and PFA files.

Numbers may be JSON numbers, decimal strings or rational strings "p/q". In
exact mode every number is read as a Fraction (decimals by their written
digits), so "9/10", "0.9" and 0.9 all load as 9/10.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import ParseError, ValidationError
from .game import PAIR_SEP, BlindGame, make_belief
from .numeric import EXACT, to_number
from .pfa import PFA, validate_pfa


def _load_json(source) -> dict:
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return data


def _names(data: dict, key: str, required: bool = True) -> tuple | None:
    if key not in data:
        if required:
            raise ParseError(f"missing required field {key!r}")
        return None
    value = data[key]
    if not isinstance(value, list) or not value or not all(isinstance(x, (str, int)) for x in value):
        raise ParseError(f"field {key!r} must be a nonempty array of names")
    names = tuple(str(x) for x in value)
    if len(set(names)) != len(names):
        raise ParseError(f"field {key!r} has duplicate names")
    return names


def _num(x, mode: str, where: str):
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise ParseError(f"{where}: expected a number, got {x!r}")
    try:
        return to_number(x, mode)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"{where}: cannot parse number {x!r}") from exc


def _table(data: dict, key: str, valid_keys: set, single: tuple | None) -> dict:
    table = data.get(key)
    if not isinstance(table, dict):
        raise ParseError(f"field {key!r} must be an object keyed by \"i{PAIR_SEP}j\"")
    out = {}
    for k, v in table.items():
        full = k
        if single is not None and PAIR_SEP not in k:
            full = f"{k}{PAIR_SEP}{single[0]}"
        if full not in valid_keys:
            raise ParseError(f"{key}: unknown action key {k!r}")
        out[full] = v
    missing = valid_keys - set(out)
    if missing:
        raise ParseError(f"{key}: missing action keys {sorted(missing)}")
    return out


def parse_game(source, mode: str = EXACT) -> BlindGame:
    """Load and validate a game file (path or already-decoded dict)."""
    data = _load_json(source)
    states = _names(data, "states")
    actions1 = _names(data, "actions1")
    actions2 = _names(data, "actions2", required=False) or ("*",)
    keys = {f"{i}{PAIR_SEP}{j}" for i in actions1 for j in actions2}
    single = actions2 if len(actions2) == 1 else None
    trans = _table(data, "transitions", keys, single)
    rews = _table(data, "rewards", keys, single)
    k = len(states)
    mats, rvec = {}, {}
    for key in keys:
        m = trans[key]
        if not isinstance(m, list) or len(m) != k or any(not isinstance(r, list) or len(r) != k for r in m):
            raise ParseError(f"transitions[{key!r}] must be a {k}x{k} array")
        mats[key] = [[_num(x, mode, f"transitions[{key!r}][{r}][{c}]") for c, x in enumerate(row)] for r, row in enumerate(m)]
        r = rews[key]
        if not isinstance(r, list) or len(r) != k:
            raise ParseError(f"rewards[{key!r}] must be an array of length {k}")
        rvec[key] = [_num(x, mode, f"rewards[{key!r}][{c}]") for c, x in enumerate(r)]
    b1 = None
    if "initial_belief" in data:
        raw = data["initial_belief"]
        if not isinstance(raw, list):
            raise ParseError("initial_belief must be an array")
        b1 = [_num(x, mode, f"initial_belief[{c}]") for c, x in enumerate(raw)]
    game = BlindGame.from_tables(states, actions1, actions2, mats, rvec, mode)
    if b1 is not None:
        try:
            game = game.with_initial_belief(make_belief(b1, mode, k))
        except ValidationError as exc:
            raise ParseError(f"initial_belief: {exc}") from exc
    return game


def _emit(x) -> Any:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else str(x)
    return x


def game_to_dict(game: BlindGame) -> dict:
    out = {
        "states": list(game.states),
        "actions1": list(game.actions1),
        "actions2": list(game.actions2),
        "transitions": {game.pair_name(a): [[_emit(x) for x in row] for row in m] for a, m in enumerate(game.transitions)},
        "rewards": {game.pair_name(a): [_emit(x) for x in r] for a, r in enumerate(game.rewards)},
    }
    if game.initial_belief is not None:
        out["initial_belief"] = [_emit(x) for x in game.initial_belief]
    return out


def dump_game(game: BlindGame, path=None) -> str:
    text = json.dumps(game_to_dict(game), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


def parse_pfa(source, mode: str = EXACT, require_nonabsorbing: bool = True) -> PFA:
    data = _load_json(source)
    states = _names(data, "states")
    symbols = _names(data, "symbols")
    keys = {f"{k}{PAIR_SEP}{i}" for k in states for i in symbols}
    table = data.get("transitions")
    if not isinstance(table, dict):
        raise ParseError("field 'transitions' must be an object keyed by \"k|i\"")
    unknown = set(table) - keys
    if unknown:
        raise ParseError(f"transitions: unknown key {sorted(unknown)[0]!r}")
    missing = keys - set(table)
    if missing:
        raise ParseError(f"transitions: missing keys {sorted(missing)}")
    k = len(states)
    mats = []
    for sym in symbols:
        rows = []
        for st in states:
            key = f"{st}{PAIR_SEP}{sym}"
            row = table[key]
            if not isinstance(row, list) or len(row) != k:
                raise ParseError(f"transitions[{key!r}] must be an array of length {k}")
            rows.append([_num(x, mode, f"transitions[{key!r}][{c}]") for c, x in enumerate(row)])
        mats.append(rows)
    acc = data.get("accepting")
    if not isinstance(acc, list) or any(str(a) not in states for a in acc):
        raise ParseError("accepting must be an array of state names")
    init = data.get("initial")
    if str(init) not in states:
        raise ParseError(f"initial state {init!r} is not a state")
    pfa = PFA(
        states,
        symbols,
        tuple(mats),
        frozenset(states.index(str(a)) for a in acc),
        states.index(str(init)),
        mode,
    )
    if require_nonabsorbing:
        validate_pfa(pfa)
    return pfa


def pfa_to_dict(pfa: PFA) -> dict:
    return {
        "states": list(pfa.states),
        "symbols": list(pfa.symbols),
        "transitions": {
            f"{st}{PAIR_SEP}{sym}": [_emit(x) for x in pfa.transitions[i][r]]
            for r, st in enumerate(pfa.states)
            for i, sym in enumerate(pfa.symbols)
        },
        "accepting": [pfa.states[b] for b in sorted(pfa.accepting)],
        "initial": pfa.states[pfa.initial],
    }
