"""Bundled example files."""

from importlib import resources

from .io import parse_game, parse_pfa
from .numeric import EXACT

NAMES = ("machine_maintenance", "swap_identity", "inspection_game")


def example_path(name: str):
    return resources.files("ergoblind") / "data" / f"{name}.json"


def load_game(name: str, mode: str = EXACT):
    with resources.as_file(example_path(name)) as p:
        return parse_game(p, mode)


def load_pfa(name: str = "coin_pfa", mode: str = EXACT):
    with resources.as_file(example_path(name)) as p:
        return parse_pfa(p, mode)
