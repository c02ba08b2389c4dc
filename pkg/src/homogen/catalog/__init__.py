"""Bundled small groups, each in its left regular representation.

``natural_action(name)`` gives the small-degree faithful action the group
was generated from.
"""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

from ..errors import InputError
from ..formats import parse_action, parse_group
from ..perms import GroupAction, PermGroup

NAMES = ("C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12",
         "C2xC2", "C2xC4", "C2xC6", "C3xC3", "S3", "D4", "D6", "Q8", "A4", "Dic3")


def _read(filename: str) -> str:
    try:
        return resources.files(__package__).joinpath(filename).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"no catalog entry {filename!r}") from None


@lru_cache(maxsize=None)
def load(name: str) -> PermGroup:
    if name not in NAMES:
        raise InputError(f"unknown catalog group {name!r}; known: {', '.join(NAMES)}")
    group = parse_group(_read(f"{name}.grp"))
    group.elements
    return group


@lru_cache(maxsize=None)
def natural_action(name: str) -> GroupAction:
    return parse_action(_read(f"{name}.natural.act"), load(name))


def groups(max_order: int | None = None) -> list[PermGroup]:
    out = [load(n) for n in NAMES]
    if max_order is not None:
        out = [g for g in out if g.order() <= max_order]
    return out
