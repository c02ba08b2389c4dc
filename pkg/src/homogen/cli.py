"""``homogen`` command line.

Exit codes: 0 affirmative, 1 negative, 2 input error, 3 capacity exceeded,
4 integrity failure (a construction or lemma check that should never fail).
With ``--json`` a single report object is written to stdout; apart from the
``timings`` field it is a pure function of the arguments and input files.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from importlib import resources
from pathlib import Path

from . import catalog
from .actions import d_structure_on_group
from .builder import build_universal_action, small_group_embedding, verify_extension_property
from .classd import (AmalgamProblem, count_class_d, enumerate_class_d, i3_free_graphs,
                     is_i3_free, is_in_class_d, is_semifinal, random_class_d, strong_amalgam)
from .core import (Embedding, automorphism_group, find_embeddings, induced_substructure,
                   is_ultrahomogeneous)
from .errors import CapacityError, HomogenError, InputError, IntegrityError
from .formats import (format_perm, parse_group, parse_structure_with_names, serialize_action,
                      serialize_group, serialize_structure)
from .oracle import lemma_equivalence_rows
from .perms import Permutation, contains_c4_or_klein
from .tower import eta_composite, rado_tower, witness_property
from .witness import (REMARK_NAMES, check_age_group_extensibility, is_group_extensive,
                      obstruction_config, random_obstruction_hosts, remark_generator,
                      remark_structure, universality_of_finite, verify_obstruction)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_CAPACITY, EXIT_INTEGRITY = 0, 1, 2, 3, 4


def plain(x):
    """Convert results to JSON-ready values with a deterministic order."""
    if isinstance(x, Permutation):
        return list(x.images)
    if isinstance(x, dict):
        return {str(plain(k)) if not isinstance(k, str) else k: plain(v) for k, v in x.items()}
    if isinstance(x, (set, frozenset)):
        return sorted((plain(v) for v in x), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


class Run:
    """Collects one invocation's report."""

    def __init__(self, command: str):
        self.command = command
        self.inputs: dict[str, str] = {}
        self.verdicts: dict = {}
        self.witnesses: dict = {}
        self.results: dict = {}
        self.text: list[str] = []
        self.error: str | None = None
        self.started = time.perf_counter()

    def read(self, spec: str) -> str:
        """File contents; ``data:NAME`` reads a bundled example."""
        if spec.startswith("data:"):
            name = spec[5:]
            try:
                raw = resources.files("homogen").joinpath(f"data/{name}.txt").read_bytes()
            except FileNotFoundError:
                raise InputError(f"no bundled structure {name!r}") from None
        else:
            try:
                raw = Path(spec).read_bytes()
            except OSError as exc:
                raise InputError(f"cannot read {spec}: {exc.strerror}") from None
        self.inputs[spec] = "sha256:" + hashlib.sha256(raw).hexdigest()
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            raise InputError(f"{spec} is not UTF-8") from None

    def structure(self, spec: str):
        return parse_structure_with_names(self.read(spec))[0]

    def say(self, line: str = ""):
        self.text.append(line)

    def report(self, code: int) -> dict:
        out = {
            "command": self.command,
            "inputs": self.inputs,
            "verdicts": plain(self.verdicts),
            "witnesses": plain(self.witnesses),
            "results": plain(self.results),
            "exit_code": code,
            "timings": {"seconds": round(time.perf_counter() - self.started, 6)},
        }
        if self.error is not None:
            out["error"] = self.error
        return out


def _ints(text: str | None):
    if text is None:
        return None
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"expected a comma-separated list of integers, got {text!r}") from None


def _group(run: Run, spec: str):
    if spec.startswith("catalog:"):
        name = spec[8:]
        G = catalog.load(name)
        run.inputs[spec] = "catalog"
        return G, name
    G = parse_group(run.read(spec))
    return G, G.name or Path(spec).stem


# subcommands -------------------------------------------------------------

def cmd_check(run: Run, args) -> int:
    M = run.structure(args.file)
    verdict = is_in_class_d(M)
    run.verdicts["in_class_d"] = verdict.ok
    if not M.loops():
        run.verdicts["i3_free"] = is_i3_free(M).ok
    run.verdicts["semifinal"] = is_semifinal(M).ok
    if not verdict.ok:
        kind, where = verdict.witness
        run.witnesses["violation"] = {"kind": kind, "at": where}
    run.results["n"] = M.n
    run.say(f"{M.name}: n={M.n} |R|={len(M.R)} |S|={len(M.S)}")
    run.say(f"in_class_d: {str(verdict.ok).lower()}")
    if not verdict.ok:
        run.say(f"violation: {verdict.witness[0]} at {plain(verdict.witness[1])}")
    return EXIT_OK if verdict.ok else EXIT_NEGATIVE


def cmd_aut(run: Run, args) -> int:
    M = run.structure(args.file)
    G = automorphism_group(M)
    gens = list(G.generators)
    run.results.update(order=G.order(), generators=gens,
                       cyclic=G.is_cyclic(), abelian=G.is_abelian())
    run.say(f"|Aut({M.name})| = {G.order()}")
    run.say(serialize_group(G, f"Aut_{M.name}").rstrip())
    code = EXIT_OK
    if args.ultrahomogeneous:
        uh = is_ultrahomogeneous(M)
        run.verdicts["ultrahomogeneous"] = uh.ok
        if not uh.ok:
            run.witnesses["non_extending"] = uh.witness
            code = EXIT_NEGATIVE
        run.say(f"ultrahomogeneous: {str(uh.ok).lower()}")
    return code


def cmd_embeddings(run: Run, args) -> int:
    A = run.structure(args.source)
    M = run.structure(args.target)
    embs = find_embeddings(A, M)
    run.verdicts["embeds"] = bool(embs)
    run.results["count"] = len(embs)
    shown = embs if args.limit is None else embs[:args.limit]
    run.results["embeddings"] = [list(e.map) for e in shown]
    run.say(f"{len(embs)} embeddings of {A.name} into {M.name}")
    for e in shown:
        run.say(" ".join(map(str, e.map)))
    return EXIT_OK if embs else EXIT_NEGATIVE


def cmd_amalgamate(run: Run, args) -> int:
    A = run.structure(args.a)
    B = run.structure(args.b)
    C = run.structure(args.c)
    problem = AmalgamProblem.over(A, B, C, _ints(args.map_b), _ints(args.map_c))
    D, e_B, e_C = strong_amalgam(problem)
    run.verdicts["in_class_d"] = is_in_class_d(D).ok
    run.results.update(n=D.n, e_B=list(e_B.map), e_C=list(e_C.map))
    text = serialize_structure(D)
    run.results["structure"] = text
    _emit(run, text, args.output)
    return EXIT_OK if run.verdicts["in_class_d"] else EXIT_INTEGRITY


def cmd_enumerate(run: Run, args) -> int:
    n = args.n
    if n < 0:
        raise InputError("n must be non-negative")
    if args.count_only:
        graphs = sum(1 for _ in i3_free_graphs(n))
        total = count_class_d(n)
        run.results.update(n=n, i3_free_graphs=graphs, count=total)
        run.say(f"n={n}: {graphs} I3-free oriented graphs, {total} structures in D")
        return EXIT_OK
    if args.sample is not None:
        rng = random.Random(args.seed)
        texts = []
        for i in range(args.sample):
            M = random_class_d(n, rng.getrandbits(64)).renamed(f"sample{i}")
            texts.append(serialize_structure(M))
        run.results.update(n=n, seed=args.seed, structures=texts)
        for t in texts:
            run.say(t.rstrip())
        return EXIT_OK
    digest = hashlib.sha256()
    count = 0
    for i, M in enumerate(enumerate_class_d(n, cap=args.cap)):
        text = serialize_structure(M.renamed(f"D{n}_{i}"))
        digest.update(text.encode())
        count += 1
        if not args.json:
            run.say(text.rstrip())
    run.results.update(n=n, count=count, digest="sha256:" + digest.hexdigest())
    return EXIT_OK


def cmd_build_on_group(run: Run, args) -> int:
    G, name = _group(run, args.group)
    built = d_structure_on_group(G)
    run.results["group_order"] = G.order()
    run.verdicts["d_structure"] = built.ok
    if not built.ok:
        sub = built.refusal
        run.witnesses["subgroup"] = sub
        kind = "C4" if any(g.order() == 4 for g in sub) else "C2xC2"
        run.witnesses["kind"] = kind
        run.say(f"refused: {name} contains a {kind} subgroup")
        for g in sub:
            run.say(f"  {format_perm(g)}")
        return EXIT_NEGATIVE
    M = built.structure.renamed(f"D_{name}")
    run.verdicts["in_class_d"] = is_in_class_d(M).ok
    run.verdicts["faithful"] = built.action.is_faithful()
    text = serialize_structure(M)
    run.results["structure"] = text
    _emit(run, text, args.output)
    return EXIT_OK


def cmd_lemma_test(run: Run, args) -> int:
    rows = lemma_equivalence_rows(args.max_order, args.max_points)
    three = [r for r in rows if r.three_condition != r.three_oracle]
    four = [r for r in rows if r.four_condition != r.four_oracle]
    run.results["actions"] = len(rows)
    run.results["rows"] = [r.as_dict() for r in rows]
    run.verdicts["three_set_equivalence"] = not three
    run.verdicts["four_set_equivalence"] = not four
    group_rows = []
    for name in catalog.NAMES:
        G = catalog.load(name)
        if G.order() > args.catalog_order:
            continue
        has = contains_c4_or_klein(G).ok
        built = d_structure_on_group(G)
        good = built.ok and is_in_class_d(built.structure).ok and built.action.is_faithful()
        group_rows.append({"group": name, "order": G.order(), "c4_or_klein": has,
                           "d_structure": built.ok, "agrees": good != has})
    run.results["groups"] = group_rows
    run.verdicts["group_equivalence"] = all(r["agrees"] for r in group_rows)
    bad = [r.action for r in three + four] + [r["group"] for r in group_rows if not r["agrees"]]
    if bad:
        run.witnesses["discrepancies"] = bad
    run.say(f"{len(rows)} actions, {len(group_rows)} groups")
    for key, value in run.verdicts.items():
        run.say(f"{key}: {str(value).lower()}")
    return EXIT_INTEGRITY if bad else EXIT_OK


def cmd_build(run: Run, args) -> int:
    A = run.structure(args.seed)
    if A.n < 4:
        emb = small_group_embedding(A)
        run.verdicts.update(in_class_d=is_in_class_d(emb.structure).ok,
                            faithful=emb.action.is_faithful())
        run.results.update(route="C6", group_order=emb.source.order(),
                           into_c6=emb.into_c6, structure=serialize_structure(emb.structure))
        run.say(f"|A| = {A.n} < 4: Aut(A) of order {emb.source.order()} embeds via C6")
        run.say(serialize_structure(emb.structure).rstrip())
        return EXIT_OK if all(run.verdicts.values()) else EXIT_INTEGRITY
    final, report, stages = build_universal_action(
        A, rounds=args.rounds, size_bound=args.size_bound, max_points=args.budget,
        keep_stages=args.emit_stages is not None)
    run.results.update(report.as_dict())
    run.results.pop("verdicts")
    run.verdicts.update(report.verdicts)
    if args.verify_extension is not None:
        ext = verify_extension_property(final.structure, args.verify_extension,
                                        within=range(report.stage_sizes[0]))
        run.verdicts["extension_property_m0"] = ext.satisfied
        run.results["extension_check"] = ext.as_dict()
    if args.emit_stages is not None:
        out = Path(args.emit_stages)
        out.mkdir(parents=True, exist_ok=True)
        G = final.group
        (out / "group.grp").write_text(serialize_group(G, "G"), encoding="utf-8")
        for i, st in enumerate(stages):
            (out / f"stage{i}.txt").write_text(
                serialize_structure(st.structure.renamed(f"M{i}")), encoding="utf-8")
            (out / f"stage{i}.act").write_text(
                serialize_action(st.action.base, f"M{i}", "G"), encoding="utf-8")
        run.results["emitted"] = len(stages)
    run.say(f"stage sizes: {report.stage_sizes}")
    run.say(f"realized {len(report.realized)} tasks, unrealized {len(report.unrealized)}")
    for key, value in run.verdicts.items():
        run.say(f"{key}: {str(value).lower()}")
    if not all(run.verdicts.values()):
        return EXIT_INTEGRITY
    if not report.complete:
        run.error = "budget exhausted before every task was realized"
        return EXIT_CAPACITY
    return EXIT_OK


def cmd_rado(run: Run, args) -> int:
    A = run.structure(args.seed)
    stages = rado_tower(A, args.k, budget=args.budget)
    sizes = [s.graph.n for s in stages]
    run.results.update(sizes=sizes, aut_order=len(stages[0].eta))
    run.results["eta"] = {str(list(g.images)): list(h.images)
                          for g, h in sorted(eta_composite(stages).items())}
    for st in stages[1:]:
        wp = witness_property(st)
        run.verdicts[f"witness_property_{st.k}"] = wp.ok
        if not wp.ok:
            run.witnesses[f"stage_{st.k}"] = wp.witness
    run.verdicts["eta_injective_homomorphism"] = True
    run.say(f"stage sizes: {sizes}")
    for key, value in run.verdicts.items():
        run.say(f"{key}: {str(value).lower()}")
    return EXIT_OK if all(run.verdicts.values()) else EXIT_INTEGRITY


def cmd_extension_check(run: Run, args) -> int:
    M = run.structure(args.file)
    rep = verify_extension_property(M, args.s, within=_ints(args.within))
    run.verdicts["extension_property"] = rep.satisfied
    run.results.update(rep.as_dict())
    run.say(f"checked {rep.checked} types, realized {rep.realized}")
    run.say(f"extension_property: {str(rep.satisfied).lower()}")
    return EXIT_OK if rep.satisfied else EXIT_NEGATIVE


def cmd_counterexample(run: Run, args) -> int:
    if args.which == "remark":
        return _remark(run)
    return _obstruction(run, args)


def _remark(run: Run) -> int:
    B = remark_structure()
    f = remark_generator()
    G = automorphism_group(B)
    name = {i: n for i, n in enumerate(REMARK_NAMES)}
    uh = is_ultrahomogeneous(B)
    aut_ok = G.order() == 4 and G.is_cyclic() and f in G and f.order() == 4
    uni = universality_of_finite(B)
    age = check_age_group_extensibility(B)
    ext = [g for g in G.elements if g.images[0] == 1 and g.images[1] == 0]
    run.verdicts.update(ultrahomogeneous=uh.ok, aut_cyclic_order_4=aut_ok,
                        aut_universal=uni.universal,
                        age_not_group_extensible=not age.extensible and age.failing == [(0, 1)])
    run.results.update(aut_order=G.order(), generator=f, universality=uni.classes,
                       failing=[[name[v] for v in U] for U in age.failing],
                       swap_extensions=[{"element": g, "order": g.order()} for g in ext])
    failing_rows = [r for r in age.classes if not r["extensible"]]
    run.witnesses["failing_embeddings"] = [[e["map"] for e in r["embeddings"]] for r in failing_rows]

    def fmt(p):
        return "(" + ") (".join(" ".join(name[x] for x in c) for c in p.cycles()) + ")" \
            if not p.is_identity() else "id"
    run.say(f"B: {B.n} vertices, {len(B.R)} R-tuples (loops at a, a')")
    run.say(f"Aut(B) has order {G.order()}, cyclic: {str(G.is_cyclic()).lower()}, generator f = {fmt(f)}")
    run.say(f"ultrahomogeneous: {str(uh.ok).lower()}")
    run.say(f"age classes: {len(uni.classes)}; Aut orders: "
            + ", ".join(str(r["aut_order"]) for r in uni.classes))
    run.say(f"universal: {str(uni.universal).lower()} (every Aut(A) embeds into C4)")
    for g in ext:
        run.say(f"extension of the swap of a, a': {fmt(g)} has order {g.order()}")
    run.say("failing classes: " + ", ".join("{" + ", ".join(r) + "}" for r in run.results["failing"]))
    run.say(f"age group-extensible: {str(age.extensible).lower()}")
    return EXIT_OK if all(run.verdicts.values()) else EXIT_NEGATIVE


def _obstruction(run: Run, args) -> int:
    cfg = obstruction_config()
    hosts = [cfg.structure]
    if args.random:
        hosts += random_obstruction_hosts(args.random, args.seed, max_size=args.max_size)
    violations = []
    sizes = []
    for i, M in enumerate(hosts):
        v = verify_obstruction(M, r_only=args.r_only)
        sizes.append(M.n)
        if not v.holds:
            violations.append({"host": i, "structure": serialize_structure(M), **v.counterexample})
    base = verify_obstruction(cfg.structure, r_only=args.r_only)
    f = (cfg.fa, cfg.fb, cfg.fc)
    A, _ = induced_substructure(cfg.structure, f)
    ext = is_group_extensive(Embedding(A, cfg.structure, f), cfg.structure)
    run.verdicts["config_not_group_extensive"] = not ext.ok
    run.verdicts["no_swap_automorphism"] = not violations
    run.results.update(hosts=len(hosts), sizes=sizes, seed=args.seed, steps=base.steps)
    if violations:
        run.witnesses["violations"] = violations
    run.say(f"obstruction configuration: f(a)={f[0]}, f(b)={f[1]}, f(c)={f[2]}, v={cfg.v}")
    for step in base.steps:
        run.say(step)
    run.say(f"checked {len(hosts)} structures in D (sizes {min(sizes)}..{max(sizes)})")
    run.say(f"no_swap_automorphism: {str(not violations).lower()}")
    return EXIT_INTEGRITY if violations else EXIT_OK


def _emit(run: Run, text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
        run.say(f"wrote {output}")
    else:
        run.say(text.rstrip())


# parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="homogen", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="write a JSON report to stdout")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    s = sub.add_parser("check", help="membership in D")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("aut", help="automorphism group")
    s.add_argument("file")
    s.add_argument("--ultrahomogeneous", action="store_true")
    s.set_defaults(func=cmd_aut)

    s = sub.add_parser("embeddings", help="embeddings of SOURCE into TARGET")
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--limit", type=int)
    s.set_defaults(func=cmd_embeddings)

    s = sub.add_parser("amalgamate", help="strong amalgam of B and C over A")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("c")
    s.add_argument("--map-b", help="images of A's vertices in B (default: identity)")
    s.add_argument("--map-c", help="images of A's vertices in C (default: identity)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_amalgamate)

    s = sub.add_parser("enumerate", help="labeled structures in D")
    s.add_argument("n", type=int)
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--sample", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=int, default=5)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("build-on-group", help="invariant D-structure on a group")
    s.add_argument("group", help="group file, or catalog:NAME")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_build_on_group)

    s = sub.add_parser("lemma-test", help="brute-force checks of the orbit conditions")
    s.add_argument("--max-order", type=int, default=8)
    s.add_argument("--max-points", type=int, default=5)
    s.add_argument("--catalog-order", type=int, default=16)
    s.set_defaults(func=cmd_lemma_test)

    s = sub.add_parser("build", help="universal action construction")
    s.add_argument("--seed", required=True, help="structure file for A")
    s.add_argument("--rounds", type=int, default=1)
    s.add_argument("--size-bound", type=int, default=2)
    s.add_argument("--budget", type=int)
    s.add_argument("--emit-stages")
    s.add_argument("--verify-extension", type=int, metavar="S")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("rado", help="finite prefix of the Rado tower")
    s.add_argument("--seed", required=True, help="graph file for M0")
    s.add_argument("-k", type=int, default=1)
    s.add_argument("--budget", type=int, default=4096)
    s.set_defaults(func=cmd_rado)

    s = sub.add_parser("extension-check", help="one-point extension property up to size s")
    s.add_argument("file")
    s.add_argument("-s", type=int, default=1)
    s.add_argument("--within")
    s.set_defaults(func=cmd_extension_check)

    s = sub.add_parser("counterexample", help="the six-vertex example or the obstruction")
    s.add_argument("which", choices=("remark", "obstruction"))
    s.add_argument("--random", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-size", type=int, default=7)
    s.add_argument("--r-only", action="store_true",
                   help="match copies of the edge pattern whatever their semifinal")
    s.set_defaults(func=cmd_counterexample)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    parser = build_parser()
    run = Run(argv[0] if argv else "")
    try:
        args = parser.parse_args(argv)
        run.command = args.command
        code = args.func(run, args)
    except InputError as exc:
        run.error, code = str(exc), EXIT_INPUT
    except CapacityError as exc:
        run.error, code = str(exc), EXIT_CAPACITY
    except IntegrityError as exc:
        run.error, code = str(exc), EXIT_INTEGRITY
    except HomogenError as exc:
        run.error, code = str(exc), exc.exit_code
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if want_json:
        json.dump(run.report(code), sys.stdout, sort_keys=True, indent=2)
        sys.stdout.write("\n")
    else:
        if run.text:
            print("\n".join(run.text))
        if run.error:
            print(f"homogen: error: {run.error}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
