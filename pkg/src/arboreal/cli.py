"""Command-line surface: poset dumps, link homology, category tables, verify.

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 validation
error, 4 unsupported export.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from itertools import combinations

from . import complexes, hypersurface, poset as poset_mod, quiver as quiver_mod, sheaves, trees
from .errors import ArborealError, DimensionTooHigh
from .linalg import GF2, QQ, parse_field

MAX_SIZE_CAP = 7
FREE_TREE_COUNTS = [1, 1, 1, 2, 3, 6, 11]  # sizes 1..7

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_EXPORT = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot parse {path}: {exc}")


def _load_tree(path):
    data = _load_json(path)
    try:
        return trees.tree_from_json(data), data.get("root")
    except ArborealError as exc:
        raise CliError(EXIT_VALIDATION, f"invalid tree in {path}: {exc}")


def _require_root(tree, root, flag_root):
    root = flag_root or root
    if root is None:
        raise CliError(EXIT_VALIDATION, "a root is required (use --root or a 'root' key)")
    root = str(root)
    if root not in tree.adjacency:
        raise CliError(EXIT_VALIDATION, f"root {root!r} is not a vertex")
    return trees.RootedTree(tree, root)


def _emit(text: str, out_path):
    data = text if isinstance(text, bytes) else text.encode()
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())


def cmd_poset(args) -> int:
    tree, _ = _load_tree(args.tree)
    p = poset_mod.enumerate_poset(tree)
    fvec = complexes.f_vector(p)
    dump = json.dumps(p.to_json(), sort_keys=True, indent=1) + "\n"
    if args.out:
        _emit(dump, args.out)
    print(f"elements: {len(p)}")
    print(f"link f-vector: {fvec}")
    return EXIT_OK


def cmd_link(args) -> int:
    tree, _ = _load_tree(args.tree)
    p = poset_mod.enumerate_poset(tree)
    sc = complexes.order_complex(p, drop_minimum=True)
    if args.action == "betti":
        field = QQ if args.field is None else _parse_field_arg(args.field)
        bet = complexes.betti(sc, field)
        lines = []
        if not sc.simplices:
            lines.append(f"b~-1 = {bet.get(-1, 0)}")
        else:
            for d in range(0, sc.dim + 1):
                lines.append(f"b~{d} = {bet.get(d, 0)}")
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    # export
    fmt = args.format or "json"
    try:
        payload = complexes.export_complex(sc, fmt)
    except DimensionTooHigh as exc:
        raise CliError(EXIT_EXPORT, str(exc))
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc))
    _emit(payload, args.out)
    return EXIT_OK


def _parse_field_arg(spec):
    try:
        return parse_field(spec)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc))


def cmd_cat(args) -> int:
    tree, root = _load_tree(args.tree)
    rt = _require_root(tree, root, args.root)
    q = quiver_mod.TreeQuiver(rt)
    verts = tree.vertices
    if args.action == "homtable":
        lines = ["homtable " + " ".join(verts)]
        for a in verts:
            row = []
            for b in verts:
                h, _ = quiver_mod.hom_ext(q, quiver_mod.projective(q, a), quiver_mod.projective(q, b))
                row.append(str(h))
            lines.append(f"{a}: " + " ".join(row))
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    if args.action == "rhom":
        gens = {v: sheaves.generator_P(rt, v) for v in verts}
        lines = ["rhom " + " ".join(verts)]
        impure = []
        for a in verts:
            row = []
            for b in verts:
                dims = sheaves.rhom(gens[a], gens[b])
                row.append(str(dims.get(0, 0)))
                if set(dims) - {0}:
                    impure.append((a, b, dims))
            lines.append(f"{a}: " + " ".join(row))
        if impure:
            lines.append(f"nonzero off-degree entries: {impure}")
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    # restrict
    if not args.correspondence:
        raise CliError(EXIT_VALIDATION, "--correspondence FILE is required for restrict")
    cdata = _load_json(args.correspondence)
    try:
        corr = trees.correspondence_from_json(tree, cdata)
    except ArborealError as exc:
        raise CliError(EXIT_VALIDATION, f"invalid correspondence: {exc}")
    lines = [f"restrict S={{{','.join(corr.s_vertices)}}} K={{{','.join('-'.join(e) for e in corr.contracted)}}}"]
    for v in verts:
        image = quiver_mod.restriction(q, corr, quiver_mod.one_term(q, v))
        if image.is_zero():
            lines.append(f"P_{v} -> 0")
        else:
            parts = [
                f"{n}:[" + ",".join(image.terms[n]) + "]" for n in image.degrees()
            ]
            lines.append(f"P_{v} -> " + " ".join(parts))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- verification suites -------------------------------------------------------

def _tree_payloads(max_size, cap):
    out = []
    for n in range(1, min(max_size, cap) + 1):
        for t in trees.free_trees(n):
            out.append(json.dumps(t.to_json(), sort_keys=True))
    return out


def _rooted_payloads(max_size, cap):
    out = []
    for n in range(1, min(max_size, cap) + 1):
        for rt in trees.rooted_trees(n):
            out.append(json.dumps(rt.to_json(), sort_keys=True))
    return out


def suite_trees(payload):
    n = int(payload)
    found = len(trees.free_trees(n))
    expected = FREE_TREE_COUNTS[n - 1]
    fails = []
    if found != expected:
        fails.append(f"free tree count at n={n}: {found} != {expected}")
    return 1, fails


def suite_counts(payload):
    n = int(payload)
    p = poset_mod.enumerate_poset(trees.path_tree(n))
    expected = 2 ** (n + 1) - n - 3 + 1
    fails = []
    if len(p) != expected:
        fails.append(f"chain poset size at n={n}: {len(p)} != {expected}")
    return 1, fails


def suite_poset(payload):
    tree = trees.tree_from_json(json.loads(payload))
    p = poset_mod.enumerate_poset(tree)
    fails = []
    checks = 0
    expected = sum(2 ** len(tree.induced_edges(s)) for s in tree.connected_subsets())
    checks += 1
    if len(p) != expected:
        fails.append(f"{tree!r}: element count {len(p)} != {expected}")
    minima = [
        i
        for i in range(len(p))
        if all(p.leq(i, j) for j in range(len(p)))
    ]
    checks += 1
    if minima != [p.minimum] or not p.elements[p.minimum].is_identity:
        fails.append(f"{tree!r}: minimum is not the identity correspondence")
    checks += 1
    for i in range(len(p)):
        for j in range(len(p)):
            if i != j and p.leq(i, j) and p.rank(i) >= p.rank(j):
                fails.append(f"{tree!r}: rank not strictly monotone at {i},{j}")
    if len(tree.vertices) <= 4:
        checks += 1
        for i, a in enumerate(p.elements):
            for b in p.elements:
                lhs = poset_mod.poset_leq(tree, a, b)
                rhs = poset_mod.dominates_by_composition(tree, a, b)
                if lhs != rhs:
                    fails.append(f"{tree!r}: refinement vs factoring differ on {a!r},{b!r}")
    return checks, fails


def suite_upset(payload):
    tree = trees.tree_from_json(json.loads(payload))
    p = poset_mod.enumerate_poset(tree)
    fails = []
    for c in p.elements:
        iso = poset_mod.upset_isomorphism(tree, c)
        if not iso.ok:
            fails.append(f"{tree!r}: up-set isomorphism fails at {c!r}")
    return len(p.elements), fails


def suite_an(payload):
    n = int(payload)
    fails = []
    iso = poset_mod.an_poset_isomorphism(n)
    if not iso.ok:
        fails.append(f"A_{n}: subset isomorphism fails")
    if iso.count != 2 ** (n + 1) - n - 3:
        fails.append(f"A_{n}: count {iso.count} != {2 ** (n + 1) - n - 3}")
    p = poset_mod.enumerate_poset(trees.path_tree(n))
    fvec = complexes.f_vector(p)
    skel = _skeleton_face_counts(n)
    if fvec != skel:
        fails.append(f"A_{n}: f-vector {fvec} != skeleton {skel}")
    return 3, fails


def _skeleton_face_counts(n):
    """Face counts of the (n-2)-skeleton of the n-simplex, counted directly."""
    counts = []
    for d in range(0, n - 1):
        counts.append(sum(1 for _ in combinations(range(n + 1), d + 1)))
    return tuple(counts)


def suite_homology(payload):
    tree = trees.tree_from_json(json.loads(payload))
    size = len(tree.vertices)
    p = poset_mod.enumerate_poset(tree)
    sc = complexes.order_complex(p, drop_minimum=True)
    fails = []
    expected = {size - 2: size}
    for field in (QQ, GF2):
        found = complexes.betti(sc, field)
        if found != expected:
            fails.append(f"{tree!r}: betti {found} != {expected} over {field!r}")
    cell_euler = sum((-1) ** d * c for d, c in enumerate(complexes.f_vector(p)))
    if cell_euler != sc.euler_characteristic():
        fails.append(f"{tree!r}: cell and simplicial Euler characteristics differ")
    return 3, fails


def suite_regularity(payload):
    tree = trees.tree_from_json(json.loads(payload))
    p = poset_mod.enumerate_poset(tree)
    fails = []
    rep = complexes.check_cell_regularity(p)
    if not rep.ok:
        fails.append(f"{tree!r}: regularity violations {rep.violations[:3]}")
    if not complexes.check_intersection_property(p):
        fails.append(f"{tree!r}: intersection property fails")
    return 2, fails


def suite_charts(payload):
    tree = trees.tree_from_json(json.loads(payload))
    p = poset_mod.enumerate_poset(tree)
    fails = []
    checks = 0
    for c in p.elements:
        pt = hypersurface.sample(tree, c)
        checks += 1
        if hypersurface.classify(tree, pt).key != c.key:
            fails.append(f"{tree!r}: classify(sample) != id at {c!r}")
            continue
        for alpha in c.s_vertices:
            moved = hypersurface.transport(tree, pt, alpha)
            if hypersurface.classify(tree, moved).key != c.key:
                fails.append(f"{tree!r}: chart dependence at {c!r} via {alpha}")
            back = hypersurface.transport(tree, moved, pt.chart)
            if back != pt:
                fails.append(f"{tree!r}: transport round trip fails at {c!r}")
        for r in (Fraction(1, 3), Fraction(2), Fraction(17)):
            if hypersurface.classify(tree, hypersurface.dilate(pt, r)).key != c.key:
                fails.append(f"{tree!r}: dilation changes the class at {c!r}")
    # census: every cell is hit by classifying sign-pattern points
    seen = set()
    for alpha in tree.vertices:
        others = [v for v in tree.vertices if v != alpha]
        for signs in _sign_patterns(len(others)):
            pt = hypersurface.LPoint.make(alpha, dict(zip(others, signs)))
            seen.add(hypersurface.classify(tree, pt).key)
    checks += 1
    if seen != {c.key for c in p.elements}:
        fails.append(f"{tree!r}: stratum census incomplete")
    return checks, fails


def _sign_patterns(k):
    if k == 0:
        yield ()
        return
    for rest in _sign_patterns(k - 1):
        for s in (-1, 0, 1):
            yield (s,) + rest


def suite_sheaf(payload):
    rt = trees.rooted_tree_from_json(json.loads(payload))
    verts = rt.tree.vertices
    fails = []
    checks = 0
    gens = {v: sheaves.generator_P(rt, v) for v in verts}
    for a in verts:
        for b in verts:
            found = sheaves.rhom(gens[a], gens[b])
            expected = {0: 1} if rt.leq(a, b) else {}
            checks += 1
            if found != expected:
                fails.append(f"{rt!r}: rhom(P_{a},P_{b}) = {found}, expected {expected}")
    for a in verts:
        checks += 1
        if sheaves.sections_over(_all_strata(rt), gens[a]) != {}:
            fails.append(f"{rt!r}: sections of P_{a} do not vanish")
    checks += 1
    if sheaves.sections_over(_all_strata(rt), sheaves.constant_functor(rt)) != {0: 1}:
        fails.append(f"{rt!r}: constant sections are not one-dimensional")
    # exact triangles: cone simples detected through their hom pattern
    for a in verts:
        s_cplx = sheaves.simple_complex(rt, a)
        for b in verts:
            found = sheaves.rhom(sheaves.FunctorComplex.of_functor(gens[b]), s_cplx)
            expected = {0: 1} if b == a else ({1: 1} if rt.parent.get(b) == a else {})
            checks += 1
            if found != expected:
                fails.append(f"{rt!r}: rhom(P_{b},S_{a}) = {found}, expected {expected}")
        dec = sheaves.k0_decompose(rt, sheaves.FunctorComplex.of_functor(gens[a]))
        checks += 1
        if dec != {b: 1 for b in rt.below(a)}:
            fails.append(f"{rt!r}: K0 of P_{a} is {dec}")
    # generator composition
    for a in verts:
        for b in verts:
            for c in verts:
                if rt.leq(a, b) and rt.leq(b, c):
                    lhs = sheaves.compose_maps(
                        sheaves.hom_generator(rt, b, c), sheaves.hom_generator(rt, a, b)
                    )
                    checks += 1
                    if not sheaves.maps_equal(lhs, sheaves.hom_generator(rt, a, c)):
                        fails.append(f"{rt!r}: generator composition fails {a},{b},{c}")
    return checks, fails


def _all_strata(rt):
    poset = sheaves.full_poset(rt.tree)
    return [poset.sign_vector(i) for i in range(len(poset))]


def suite_quiver(payload):
    rt = trees.rooted_tree_from_json(json.loads(payload))
    q = quiver_mod.TreeQuiver(rt)
    verts = rt.tree.vertices
    fails = []
    checks = 0
    projs = {v: quiver_mod.projective(q, v) for v in verts}
    simples = {v: quiver_mod.simple(q, v) for v in verts}
    for a in verts:
        for b in verts:
            found = quiver_mod.hom_ext(q, projs[a], projs[b])
            expected = (1, 0) if rt.leq(a, b) else (0, 0)
            checks += 1
            if found != expected:
                fails.append(f"{rt!r}: hom_ext(P_{a},P_{b}) = {found} != {expected}")
    for a, parent in q.arrows():
        checks += 2
        if quiver_mod.hom_ext(q, simples[a], simples[parent]) != (0, 1):
            fails.append(f"{rt!r}: Ext(S_{a},S_{parent}) wrong")
        if quiver_mod.hom_ext(q, simples[parent], simples[a]) != (0, 0):
            fails.append(f"{rt!r}: Ext(S_{parent},S_{a}) wrong")
    for v in verts:
        res = quiver_mod.std_resolution(q, simples[v]).minimized()
        want_terms = {0: (v,)} if v == rt.root else {-1: (rt.parent[v],), 0: (v,)}
        checks += 1
        if res.terms != want_terms:
            fails.append(f"{rt!r}: resolution of S_{v} has terms {res.terms}")
    return checks, fails


def suite_crossmodel(payload):
    rt = trees.rooted_tree_from_json(json.loads(payload))
    q = quiver_mod.TreeQuiver(rt)
    verts = rt.tree.vertices
    fails = []
    checks = 0
    gens = {v: sheaves.generator_P(rt, v) for v in verts}
    simples_sheaf = {v: sheaves.simple_complex(rt, v) for v in verts}
    for a in verts:
        for b in verts:
            h, e = quiver_mod.hom_ext(q, quiver_mod.simple(q, a), quiver_mod.simple(q, b))
            sheaf = sheaves.rhom(simples_sheaf[a], simples_sheaf[b])
            expected = {}
            if h:
                expected[0] = h
            if e:
                expected[1] = e
            checks += 1
            if sheaf != expected:
                fails.append(f"{rt!r}: simples cross-check ({a},{b}): {sheaf} != {expected}")
            h2, e2 = quiver_mod.hom_ext(q, quiver_mod.projective(q, a), quiver_mod.projective(q, b))
            sheaf2 = sheaves.rhom(gens[a], gens[b])
            expected2 = {}
            if h2:
                expected2[0] = h2
            if e2:
                expected2[1] = e2
            checks += 1
            if sheaf2 != expected2:
                fails.append(f"{rt!r}: projectives cross-check ({a},{b}): {sheaf2} != {expected2}")
    return checks, fails


def suite_restriction(payload):
    rt = trees.rooted_tree_from_json(json.loads(payload))
    q = quiver_mod.TreeQuiver(rt)
    p = poset_mod.enumerate_poset(rt.tree)
    fails = []
    checks = 0
    for c in p.elements:
        checks += 1
        try:
            quiver_mod.local_model_compare(rt, c)
        except ArborealError as exc:
            fails.append(f"{rt!r}: local compare fails at {c!r}: {exc}")
        checks += 1
        if not quiver_mod.kernel_vanishing(q, c):
            fails.append(f"{rt!r}: kernel generators survive restriction at {c!r}")
    return checks, fails


SUITES = {
    "trees": (suite_trees, "n", 7),
    "counts": (suite_counts, "n2", 6),
    "poset": (suite_poset, "tree", 5),
    "upset": (suite_upset, "tree", 5),
    "an": (suite_an, "n2", 6),
    "homology": (suite_homology, "tree2", 6),
    "regularity": (suite_regularity, "tree", 5),
    "charts": (suite_charts, "tree", 5),
    "sheaf": (suite_sheaf, "rooted", 4),
    "quiver": (suite_quiver, "rooted", 5),
    "crossmodel": (suite_crossmodel, "rooted", 4),
    "restriction": (suite_restriction, "rooted", 4),
}


def _tasks_for(name, max_size):
    fn, kind, cap = SUITES[name]
    size = min(max_size, cap)
    if kind == "n":
        return [(name, str(n)) for n in range(1, size + 1)]
    if kind == "n2":
        return [(name, str(n)) for n in range(2, size + 1)]
    if kind == "tree":
        return [(name, t) for t in _tree_payloads(size, cap)]
    if kind == "tree2":
        return [
            (name, t)
            for t in _tree_payloads(size, cap)
            if len(json.loads(t)["vertices"]) >= 2
        ]
    return [(name, t) for t in _rooted_payloads(size, cap)]


def run_task(task):
    name, payload = task
    fn = SUITES[name][0]
    checks, fails = fn(payload)
    return (name, payload, checks, sorted(fails))


def cmd_verify(args) -> int:
    max_size = args.max_size
    if max_size < 1 or max_size > MAX_SIZE_CAP:
        raise CliError(EXIT_VALIDATION, f"--max-size must be between 1 and {MAX_SIZE_CAP}")
    selected = sorted(SUITES) if not args.suites else args.suites.split(",")
    for s in selected:
        if s not in SUITES:
            raise CliError(EXIT_VALIDATION, f"unknown suite {s!r}")
    tasks = []
    for name in sorted(selected):
        tasks.extend(_tasks_for(name, max_size))
    workers = args.workers
    if workers > 1:
        import multiprocessing

        with multiprocessing.get_context("fork").Pool(workers) as pool:
            results = pool.map(run_task, tasks)
    else:
        results = [run_task(t) for t in tasks]
    results.sort(key=lambda r: (r[0], r[1]))
    summary = {"max_size": max_size, "suites": {}, "status": "pass"}
    for name, _, checks, fails in results:
        entry = summary["suites"].setdefault(name, {"checks": 0, "failures": []})
        entry["checks"] += checks
        entry["failures"].extend(fails)
    failures = sum(len(e["failures"]) for e in summary["suites"].values())
    if failures:
        summary["status"] = "fail"
    text = json.dumps(summary, sort_keys=True, indent=1) + "\n"
    if args.out:
        _emit(text, args.out)
    print(text, end="")
    return EXIT_SUITE_FAILURE if failures else EXIT_OK


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ARBOREAL_WORKERS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="arboreal")
    sub = ap.add_subparsers(dest="command", required=True)

    p_poset = sub.add_parser("poset", help="enumerate the correspondence poset")
    p_poset.add_argument("--tree", required=True)
    p_poset.add_argument("--out")
    p_poset.set_defaults(fn=cmd_poset)

    p_link = sub.add_parser("link", help="link homology and exports")
    p_link.add_argument("action", choices=["betti", "export"])
    p_link.add_argument("--tree", required=True)
    p_link.add_argument("--field", default=None, help="q or fp:P")
    p_link.add_argument("--format", choices=["off", "json"], default=None)
    p_link.add_argument("--out")
    p_link.set_defaults(fn=cmd_link)

    p_cat = sub.add_parser("cat", help="sheaf and module category tables")
    p_cat.add_argument("action", choices=["homtable", "rhom", "restrict"])
    p_cat.add_argument("--tree", required=True)
    p_cat.add_argument("--root")
    p_cat.add_argument("--correspondence")
    p_cat.add_argument("--out")
    p_cat.set_defaults(fn=cmd_cat)

    p_verify = sub.add_parser("verify", help="run invariant suites over small trees")
    p_verify.add_argument("--max-size", type=int, required=True)
    p_verify.add_argument("--suites", default=None)
    p_verify.add_argument("--workers", type=int, default=_default_workers())
    p_verify.add_argument("--out")
    p_verify.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else 0
    if getattr(args, "workers", 1) is not None and getattr(args, "workers", 1) < 1:
        print("workers must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.fn(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ArborealError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
