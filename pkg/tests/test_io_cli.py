import io
import json
from fractions import Fraction

import pytest

from ergoblind.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_INPUT, EXIT_OK, run
from ergoblind.errors import ParseError, RowSumError
from ergoblind.examples import example_path, load_game
from ergoblind.io import dump_game, game_to_dict, parse_game, parse_pfa, pfa_to_dict
from ergoblind.numeric import FLOAT

F = Fraction


def path(name):
    return str(example_path(name))


def cli(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def cli_json(*argv):
    code, text = cli(*argv, "--json")
    return code, json.loads(text)


def test_decimal_spellings_load_identically(table1):
    d = game_to_dict(table1)
    d["transitions"]["Wait|*"][0] = [0.9, "0.1", "0/1"]
    assert parse_game(d).transitions[0][0] == (F(9, 10), F(1, 10), 0)


def test_round_trip(tmp_path, inspection, table1):
    for g in (inspection, table1):
        p = tmp_path / "g.json"
        dump_game(g, p)
        assert parse_game(p) == g
    assert parse_pfa(pfa_to_dict(parse_pfa(path("coin_pfa")))) == parse_pfa(path("coin_pfa"))


def test_float_parse(table1):
    g = parse_game(path("machine_maintenance"), FLOAT)
    assert g.mode == FLOAT and g.transitions[1][0][0] == 0.95


@pytest.mark.parametrize(
    "edit, fragment",
    [
        (lambda d: d.pop("states"), "missing required field 'states'"),
        (lambda d: d["transitions"].update({"Repair": [[1]]}), "unknown action key 'Repair'"),
        (lambda d: d["transitions"].pop("Wait"), "missing action keys"),
        (lambda d: d["rewards"].update({"Wait": [1, 0]}), "array of length 3"),
        (lambda d: d["transitions"]["Basic"][1].__setitem__(0, "x/y"), "transitions['Basic|*'][1][0]"),
        (lambda d: d.update({"initial_belief": [1, 1, 0]}), "initial_belief"),
        (lambda d: d.update({"actions1": ["Wait", "Wait"]}), "duplicate"),
    ],
)
def test_parse_errors_name_the_field(edit, fragment):
    d = json.loads(example_path("machine_maintenance").read_text())
    edit(d)
    with pytest.raises(ParseError) as info:
        parse_game(d)
    assert fragment in str(info.value)


def test_bad_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"states": [\n  "a",\n}')
    with pytest.raises(ParseError) as info:
        parse_game(p)
    assert "line 3" in str(info.value)


def test_row_sum_error_propagates():
    d = json.loads(example_path("machine_maintenance").read_text())
    d["transitions"]["Wait"][0] = [0.9, 0.2, 0.0]
    with pytest.raises(RowSumError):
        parse_game(d)


def test_cli_validate_and_classify():
    code, out = cli("validate", path("machine_maintenance"))
    assert code == EXIT_OK and "states: 3" in out
    code, rep = cli_json("classify", path("machine_maintenance"))
    assert code == EXIT_OK
    assert [m["tau1"] for m in rep["outputs"]["matrices"]] == [0.9, 0.95, 0.7]
    assert all(m["is_markov"] for m in rep["outputs"]["matrices"])


def test_cli_run_report_shape():
    code, rep = cli_json("check-ergodic", path("machine_maintenance"))
    assert code == EXIT_OK
    assert set(rep) == {"command", "inputs", "outputs", "timings", "mode"}
    assert rep["mode"] == "exact"
    out = rep["outputs"]
    assert set(out) >= {"verdict", "n0", "tau_bar", "paz_bound", "counterexample"}
    assert (out["verdict"], out["n0"], out["tau_bar_exact"], out["paz_bound"]) == ("Ergodic", 1, "19/20", 6)


def test_cli_not_ergodic_exit_code():
    code, rep = cli_json("check-ergodic", path("swap_identity"))
    assert code == EXIT_FAIL
    assert rep["outputs"]["verdict"] == "NotErgodic"
    assert rep["outputs"]["counterexample"] == ["swap|*"]
    code, _ = cli("solve", path("swap_identity"), "--eps", "0.5")
    assert code == EXIT_FAIL


def test_cli_input_and_budget_errors(tmp_path):
    assert cli("validate", str(tmp_path / "missing.json"))[0] == EXIT_INPUT
    assert cli("n-eps", path("machine_maintenance"), "--eps", "1.5")[0] == EXIT_INPUT
    assert cli("solve", path("machine_maintenance"), "--eps", "0.5", "--max-states", "3")[0] == EXIT_BUDGET
    assert cli("check-ergodic", path("machine_maintenance"), "--max-products", "1")[0] == EXIT_BUDGET


def test_cli_env_mode_override(monkeypatch):
    monkeypatch.setenv("ERGO_MODE", "float")
    code, rep = cli_json("check-ergodic", path("machine_maintenance"))
    assert code == EXIT_OK and rep["mode"] == "float"
    assert rep["outputs"]["tau_bar_exact"] is None
    monkeypatch.setenv("ERGO_MODE", "decimal")
    assert cli("validate", path("machine_maintenance"))[0] == EXIT_INPUT


def test_cli_n_eps_and_solve():
    code, rep = cli_json("n-eps", path("machine_maintenance"), "--eps", "0.1")
    assert rep["outputs"]["n_eps"] == 45
    code, rep = cli_json("solve", path("machine_maintenance"), "--eps", "19/20")
    assert code == EXIT_OK
    assert rep["outputs"]["root_value_exact"] == "791/1200"
    assert rep["outputs"]["method"] == "mean-cycle"


def test_cli_build_abstract_payload():
    code, rep = cli_json("build-abstract", path("machine_maintenance"), "--eps", "19/20")
    out = rep["outputs"]
    assert (out["n_eps"], out["num_states"], out["num_beliefs"]) == (1, 4, 4)
    assert len(out["edges"]) == 12
    assert set(out["edges"][0]) == {"from", "i", "j", "to", "reward"}
    assert out["states"][0]["base"] == ["1/3", "1/3", "1/3"]


def test_cli_pfa_commands(tmp_path):
    target = tmp_path / "reduced.json"
    code, _ = cli("reduce-pfa", path("coin_pfa"), "--theta", "1/2", "-o", str(target))
    assert code == EXIT_OK
    g = parse_game(target)
    assert g.states[-1] == "sink" and g.actions1[-1] == "Restart"
    assert cli("check-ergodic", str(target))[0] == EXIT_OK
    code, rep = cli_json("pfa-search", path("coin_pfa"), "--max-len", "3")
    assert rep["outputs"]["word"] == ["a", "a"] and rep["outputs"]["acceptance_exact"] == "5/8"
    assert cli("pfa-search", path("coin_pfa"), "--max-len", "1")[0] == EXIT_FAIL
    assert cli("reduce-pfa", path("coin_pfa"), "--theta", "1")[0] == EXIT_INPUT


def test_cli_oracle_check_and_simulate():
    code, rep = cli_json("oracle-check", path("inspection_game"), "--eps", "0.3", "--horizon", "3")
    assert code == EXIT_OK
    assert rep["outputs"]["coupling"]["pass"] and rep["outputs"]["payoff_gap"]["pass"]
    args = ("simulate", path("machine_maintenance"), "--horizon", "8", "--seed", "5", "--strategy1", "cycle:Wait,Basic")
    a, b = cli_json(*args), cli_json(*args)
    assert a[1]["outputs"] == b[1]["outputs"]
    assert a[1]["outputs"]["history"][:2] == ["Wait|*", "Basic|*"]
    assert cli("simulate", path("machine_maintenance"), "--strategy1", "cycle:Fix")[0] == EXIT_INPUT


def test_bundled_games_load():
    for name in ("machine_maintenance", "swap_identity", "inspection_game"):
        assert load_game(name).num_states >= 2
