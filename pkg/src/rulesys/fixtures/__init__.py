"""Bundled example systems and datasets.

The qualitative bankruptcy data file is not redistributed here. Put the
public ``Qualitative_Bankruptcy.data.txt`` (250 rows, columns IR, MR, FF,
CR, CO, OP, class) next to this module, or pass its path explicitly.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..model import Dataset, RuleSystem, Schema
from ..textio import parse_dataset, parse_schema, parse_system

BANKRUPTCY_SYSTEMS = ("ga", "il", "nn", "ga_reduced")
BANKRUPTCY_DATA_NAMES = ("Qualitative_Bankruptcy.data.txt", "qualitative_bankruptcy.csv")


def read_text(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


@lru_cache(maxsize=None)
def toy_schema() -> Schema:
    return parse_schema(read_text("toy.schema"))


def toy_system() -> RuleSystem:
    return parse_system(read_text("toy.rules"), toy_schema())


def toy_reduced() -> RuleSystem:
    return parse_system(read_text("toy_reduced.rules"), toy_schema())


def toy_dataset() -> Dataset:
    return parse_dataset(read_text("toy.csv"), toy_schema())


@lru_cache(maxsize=None)
def bankruptcy_schema() -> Schema:
    return parse_schema(read_text("bankruptcy.schema"))


def bankruptcy_system(name: str) -> RuleSystem:
    if name not in BANKRUPTCY_SYSTEMS:
        raise ValueError(f"unknown bankruptcy system {name!r}; expected one of {BANKRUPTCY_SYSTEMS}")
    return parse_system(read_text(f"bankruptcy_{name}.rules"), bankruptcy_schema())


def find_bankruptcy_data(explicit: str | Path | None = None) -> Path | None:
    if explicit is not None:
        return Path(explicit)
    for name in BANKRUPTCY_DATA_NAMES:
        p = path(name)
        if p.is_file():
            return p
    return None


def bankruptcy_dataset(explicit: str | Path | None = None) -> Dataset:
    p = find_bankruptcy_data(explicit)
    if p is None:
        raise FileNotFoundError(
            "qualitative bankruptcy data not found; place "
            f"{BANKRUPTCY_DATA_NAMES[0]} in {path('')} or pass a path"
        )
    return parse_dataset(p.read_text(encoding="utf-8"), bankruptcy_schema())
