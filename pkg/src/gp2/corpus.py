"""Bundled graph programs for common graph-class checks."""

from importlib import resources

from .parsing import parse_program
from .program import CheckedProgram, checked

PROGRAMS = (
    "connected",
    "acyclic",
    "series_parallel",
    "eulerian",
    "euler_cycle",
)


def program_text(name: str) -> str:
    if name not in PROGRAMS:
        raise KeyError(f"unknown corpus program: {name!r}")
    path = resources.files(__package__) / "programs" / f"{name}.gp2"
    return path.read_text(encoding="utf-8")


def load(name: str) -> CheckedProgram:
    return checked(parse_program(program_text(name)))
