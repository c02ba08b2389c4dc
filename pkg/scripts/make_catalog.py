"""Regenerate src/homogen/catalog/ from small-degree generators.

Each group is written in its left regular representation (``<name>.grp``);
the small-degree representation it was built from is kept as an action of
that regular group (``<name>.natural.act``).
"""
from pathlib import Path

from homogen.formats import serialize_action, serialize_group
from homogen.perms import GroupAction, Permutation, PermGroup, closure

C = Permutation.from_cycles

NATURAL = {
    "C1": (1, [()]),
    "C2xC2": (4, [[(0, 1)], [(2, 3)]]),
    "C2xC4": (6, [[(0, 1)], [(2, 3, 4, 5)]]),
    "C2xC6": (7, [[(0, 1)], [(2, 3), (4, 5, 6)]]),
    "C3xC3": (6, [[(0, 1, 2)], [(3, 4, 5)]]),
    "S3": (3, [[(0, 1, 2)], [(0, 1)]]),
    "D4": (4, [[(0, 1, 2, 3)], [(1, 3)]]),
    "D6": (5, [[(0, 1, 2)], [(0, 1)], [(3, 4)]]),
    "Q8": (8, [[(0, 1, 3, 6), (2, 5, 7, 4)], [(0, 2, 3, 7), (1, 4, 6, 5)]]),
    "A4": (4, [[(0, 1, 2)], [(0, 1), (2, 3)]]),
    "Dic3": (7, [[(0, 1, 2)], [(1, 2), (3, 4, 5, 6)]]),
}
for k in range(2, 13):
    NATURAL[f"C{k}"] = (k, [[tuple(range(k))]])

ORDERS = {"C1": 1, "C2xC2": 4, "C2xC4": 8, "C2xC6": 12, "C3xC3": 9, "S3": 6, "D4": 8,
          "D6": 12, "Q8": 8, "A4": 12, "Dic3": 12, **{f"C{k}": k for k in range(2, 13)}}


def main(out: Path):
    out.mkdir(parents=True, exist_ok=True)
    for name, (degree, gens) in sorted(NATURAL.items()):
        natural_gens = [C(degree, *cycles) if cycles != () else Permutation.identity(degree)
                        for cycles in gens]
        natural = closure(natural_gens, degree=degree)
        assert natural.order() == ORDERS[name], (name, natural.order())
        els = list(natural.elements)
        index = {g: i for i, g in enumerate(els)}
        regular_gens = [Permutation(tuple(index[s * h] for h in els)) for s in natural_gens]
        regular = closure(regular_gens, degree=len(els), name=name)
        action = GroupAction.from_generator_images(regular, degree, natural_gens)
        assert action.is_faithful()
        (out / f"{name}.grp").write_text(serialize_group(regular, name))
        (out / f"{name}.natural.act").write_text(
            serialize_action(action, name=f"{name}_natural", group_name=name))


if __name__ == "__main__":
    main(Path(__file__).resolve().parent.parent / "src" / "homogen" / "catalog")
