"""Line-oriented text formats for structures, groups and actions.

Structure::

    structure <name>
    n <count>
    flags allow_loops          # optional; also: undirected
    R <u> <v>
    S <a> <b> <c> <d>          # one representative per partner pair
    end

Vertices are either all integer indices or all names; names get indices in
order of first appearance. Undirected structures list each edge once with
``u <= v``.

Group::

    group <name>
    perm <n>: i0 i1 ... i(n-1)
    end

Action::

    action <name> over <groupname>
    points <m>
    map <generator-index>: j0 ... j(m-1)
    end
"""
from __future__ import annotations

import re
from pathlib import Path

from .core import Structure, canonical_quad
from .errors import InputError
from .perms import GroupAction, Permutation, PermGroup

_FLAGS = ("allow_loops", "undirected")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_structure(text: str) -> Structure:
    return parse_structure_with_names(text)[0]


def parse_structure_with_names(text: str) -> tuple[Structure, list[str] | None]:
    """Parse one structure; also return vertex names when the file used them."""
    name = None
    n = None
    flags: set[str] = set()
    R_tokens: list[tuple[int, list[str]]] = []
    S_tokens: list[tuple[int, list[str]]] = []
    ended = False
    for lineno, line in _lines(text):
        if ended:
            raise InputError(f"line {lineno}: content after 'end'")
        head, *rest = line.split()
        if head == "structure":
            if name is not None or len(rest) != 1:
                raise InputError(f"line {lineno}: expected a single 'structure <name>' header")
            name = rest[0]
        elif name is None:
            raise InputError(f"line {lineno}: file must start with 'structure <name>'")
        elif head == "n":
            if n is not None or len(rest) != 1 or not rest[0].isdigit():
                raise InputError(f"line {lineno}: expected 'n <count>'")
            n = int(rest[0])
        elif head == "flags":
            for flag in rest:
                if flag not in _FLAGS:
                    raise InputError(f"line {lineno}: unknown flag {flag!r}")
                flags.add(flag)
        elif head == "R":
            if len(rest) != 2:
                raise InputError(f"line {lineno}: R needs two vertices")
            R_tokens.append((lineno, rest))
        elif head == "S":
            if len(rest) != 4:
                raise InputError(f"line {lineno}: S needs four vertices")
            S_tokens.append((lineno, rest))
        elif head == "end":
            ended = True
        else:
            raise InputError(f"line {lineno}: unknown directive {head!r}")
    if name is None:
        raise InputError("empty structure file")
    if n is None:
        raise InputError("missing 'n <count>' line")
    if not ended:
        raise InputError("missing 'end'")

    tokens = [t for _, ts in R_tokens + S_tokens for t in ts]
    numeric = [t.isdigit() for t in tokens]
    names = None
    if tokens and not any(numeric):
        names = []
        for t in tokens:
            if t not in names:
                names.append(t)
        if len(names) > n:
            raise InputError(f"{len(names)} named vertices but n = {n}")
        index = {t: i for i, t in enumerate(names)}
        convert = index.__getitem__
    elif all(numeric):
        convert = int
    else:
        raise InputError("mix of named and numeric vertices")

    R = [tuple(convert(t) for t in ts) for _, ts in R_tokens]
    S = [tuple(convert(t) for t in ts) for _, ts in S_tokens]
    M = Structure(n, frozenset(R), frozenset(S), name=name,
                  allow_loops="allow_loops" in flags, undirected="undirected" in flags)
    return M, names


def serialize_structure(M: Structure) -> str:
    lines = [f"structure {M.name}", f"n {M.n}"]
    flags = [f for f in _FLAGS if getattr(M, f)]
    if flags:
        lines.append("flags " + " ".join(flags))
    edges = sorted(M.R)
    if M.undirected:
        edges = [(u, v) for u, v in edges if u <= v]
    lines += [f"R {u} {v}" for u, v in edges]
    reps = sorted({canonical_quad(t) for t in M.S})
    lines += ["S " + " ".join(map(str, t)) for t in reps]
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_structure(path) -> Structure:
    return parse_structure(Path(path).read_text(encoding="utf-8"))


def save_structure(M: Structure, path) -> None:
    Path(path).write_text(serialize_structure(M), encoding="utf-8")


_PERM_RE = re.compile(r"^perm\s+(\d+)\s*:\s*(.*)$")
_MAP_RE = re.compile(r"^map\s+(\d+)\s*:\s*(.*)$")


def parse_perm_line(line: str) -> Permutation:
    m = _PERM_RE.match(line)
    if not m:
        raise InputError(f"bad permutation line {line!r}")
    n = int(m.group(1))
    images = [int(x) for x in m.group(2).split()]
    if len(images) != n:
        raise InputError(f"permutation declares degree {n} but lists {len(images)} images")
    return Permutation(tuple(images))


def format_perm(p: Permutation) -> str:
    return f"perm {p.degree}: " + " ".join(map(str, p.images))


def parse_group(text: str) -> PermGroup:
    name = None
    gens = []
    ended = False
    for lineno, line in _lines(text):
        if ended:
            raise InputError(f"line {lineno}: content after 'end'")
        if line.startswith("group"):
            parts = line.split()
            if name is not None or len(parts) != 2:
                raise InputError(f"line {lineno}: expected 'group <name>'")
            name = parts[1]
        elif line.startswith("perm"):
            if name is None:
                raise InputError(f"line {lineno}: 'perm' before 'group' header")
            gens.append(parse_perm_line(line))
        elif line == "end":
            ended = True
        else:
            raise InputError(f"line {lineno}: unexpected {line!r}")
    if name is None or not ended:
        raise InputError("group file needs a 'group <name>' header and 'end'")
    if not gens:
        raise InputError("group file lists no generators")
    return PermGroup(gens, name=name)


def serialize_group(G: PermGroup, name: str | None = None) -> str:
    gens = G.generators or (G.identity,)
    lines = [f"group {name or G.name or 'G'}"]
    lines += [format_perm(g) for g in gens]
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_group(path) -> PermGroup:
    return parse_group(Path(path).read_text(encoding="utf-8"))


def parse_action(text: str, group: PermGroup) -> GroupAction:
    name = None
    points = None
    maps: dict[int, Permutation] = {}
    ended = False
    for lineno, line in _lines(text):
        if ended:
            raise InputError(f"line {lineno}: content after 'end'")
        parts = line.split()
        if parts[0] == "action":
            if len(parts) != 4 or parts[2] != "over":
                raise InputError(f"line {lineno}: expected 'action <name> over <group>'")
            name = parts[1]
            if group.name is not None and parts[3] != group.name:
                raise InputError(f"action is over {parts[3]!r}, got group {group.name!r}")
        elif parts[0] == "points":
            points = int(parts[1])
        elif parts[0] == "map":
            m = _MAP_RE.match(line)
            if not m:
                raise InputError(f"line {lineno}: bad map line")
            idx = int(m.group(1))
            if idx in maps:
                raise InputError(f"line {lineno}: generator {idx} mapped twice")
            maps[idx] = Permutation(tuple(int(x) for x in m.group(2).split()))
        elif parts[0] == "end":
            ended = True
        else:
            raise InputError(f"line {lineno}: unexpected {line!r}")
    if name is None or points is None or not ended:
        raise InputError("action file needs header, 'points' line and 'end'")
    if sorted(maps) != list(range(len(group.generators))):
        raise InputError("action must map every generator exactly once")
    return GroupAction.from_generator_images(group, points, [maps[i] for i in sorted(maps)],
                                             name=name)


def serialize_action(action: GroupAction, name: str | None = None,
                     group_name: str | None = None) -> str:
    gname = group_name or action.group.name or "G"
    lines = [f"action {name or action.name or 'act'} over {gname}", f"points {action.size}"]
    for i, g in enumerate(action.group.generators):
        lines.append(f"map {i}: " + " ".join(map(str, action.perm(g).images)))
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_action(path, group: PermGroup) -> GroupAction:
    return parse_action(Path(path).read_text(encoding="utf-8"), group)
