"""Seeded verification suites and machine-readable reports.

Each suite exercises one family of invariants end to end and reports case
and pass counts plus the first counterexample, serialized tightly enough
to replay by hand.  Reports are deterministic functions of (suite,
params, seed): canonical JSON drops the wall-clock field, so equal inputs
give byte-identical reports.

The "all" suite strings together exactly the five batteries the
acceptance checklist draws from: exit-path functoriality, pruning
initiality, the geometric round trip, homology fixtures with engine
sanity, and the simplicial-circle laws.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from math import gcd
from random import Random

from .config import (
    compose_point_maps,
    induced_morphism,
    morphism_of_exit_path,
    random_configuration,
    random_exit_path,
    tree_of_configuration,
    realize_tree,
)
from .homology import (
    DEFAULT_CHAIN_CAP,
    FiniteCategoryView,
    HomologyResult,
    IntegerMatrix,
    build_category,
    chain_poset,
    homology_from_boundaries,
    nerve_chain_complex,
    poset_category,
    smith_normal_form,
)
from .simplex import (
    compose_delta,
    compose_pointed,
    enumerate_delta_hom,
    simplicial_circle,
)
from .theta import (
    compose_theta,
    decorated_trees,
    enumerate_theta_hom,
    format_tree,
    healthy_trees,
    leaf_row,
    prune,
    verify_initiality,
    verify_initiality_by_rows,
    w_hom_rows,
)

SUITE_NAMES = (
    "functoriality",
    "pruning",
    "roundtrip",
    "homology",
    "delta-laws",
    "all",
)


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    params: dict
    seed: int
    cases: int
    passes: int
    first_counterexample: str | None
    wall_ms: float

    @property
    def passed(self) -> bool:
        return self.passes == self.cases

    def to_json(self, include_wall: bool = False) -> dict:
        doc = {
            "suite": self.suite,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "seed": self.seed,
            "cases": self.cases,
            "passes": self.passes,
            "passed": self.passed,
            "first_counterexample": self.first_counterexample,
        }
        if include_wall:
            doc["wall_ms"] = self.wall_ms
        return doc


def canonical_report(report: SuiteReport) -> str:
    """Byte-stable serialization: sorted keys, no timing."""
    return json.dumps(report.to_json(), sort_keys=True, separators=(",", ":"))


class _Tally:
    """Sequential case runner; counts passes, keeps the first failure."""

    def __init__(self) -> None:
        self.cases = 0
        self.passes = 0
        self.first: str | None = None

    def record(self, name: str, ok: bool, detail: str | None = None) -> None:
        self.cases += 1
        if ok:
            self.passes += 1
        elif self.first is None:
            self.first = name if detail is None else f"{name}: {detail}"


def run_suite(name: str, params: dict | None = None, seed: int = 0) -> SuiteReport:
    if name not in SUITE_NAMES:
        raise ValueError(f"unknown suite {name!r}; pick from {SUITE_NAMES}")
    params = dict(params or {})
    started = time.perf_counter()
    if name == "all":
        tally = _Tally()
        for part in SUITE_NAMES[:-1]:
            sub = run_suite(part, params.get(part), seed)
            tally.cases += sub.cases
            tally.passes += sub.passes
            if tally.first is None and sub.first_counterexample is not None:
                tally.first = f"{part}: {sub.first_counterexample}"
        params = {}
    else:
        runner = {
            "functoriality": _run_functoriality,
            "pruning": _run_pruning,
            "roundtrip": _run_roundtrip,
            "homology": _run_homology,
            "delta-laws": _run_delta_laws,
        }[name]
        tally = runner(params, seed)
    wall_ms = (time.perf_counter() - started) * 1000.0
    return SuiteReport(
        suite=name,
        params=params,
        seed=seed,
        cases=tally.cases,
        passes=tally.passes,
        first_counterexample=tally.first,
        wall_ms=wall_ms,
    )


# ---------------------------------------------------------------------------
# functoriality of the exit-path functor


def _run_functoriality(params: dict, seed: int) -> _Tally:
    """Composable path pairs: the composed data's morphism is the composite.

    Case i draws its configuration and two chained paths from sub-seeds
    3i, 3i+1, 3i+2 on top of the suite seed, cycling the dimension through
    ``dims`` and the point count through 0..max_k.
    """
    pairs = int(params.get("pairs", 1000))
    max_k = int(params.get("max_k", 5))
    dims = params.get("dims", (1, 2, 3))
    if isinstance(dims, str):
        dims = tuple(int(v) for v in dims.split(","))
    tally = _Tally()
    for i in range(pairs):
        base = seed + 3 * i
        n = dims[i % len(dims)]
        k = Random(base).randint(0, max_k)
        start = random_configuration(n, k, seed=base)
        first = random_exit_path(start, seed=base + 1)
        second = random_exit_path(first.target, seed=base + 2)
        composite_map = compose_point_maps(second.mapping, first.mapping)
        direct = induced_morphism(start, second.target, composite_map)
        staged = compose_theta(
            morphism_of_exit_path(second), morphism_of_exit_path(first)
        )
        tally.record(
            f"case {i} n={n} k={k}",
            direct == staged,
            detail=f"start={start} mid={first.target} end={second.target} "
            f"maps={first.mapping}/{second.mapping}",
        )
    return tally


# ---------------------------------------------------------------------------
# pruning initiality


def _decoration_family(params: dict, leaf_default: int, deep_default: int):
    max_height = int(params.get("max_height", 3))
    leaf_bound = int(params.get("leaf_bound", leaf_default))
    extra = int(params.get("extra", 1))
    deep_extra = int(params.get("deep_extra", 2))
    deep_leaves = int(params.get("deep_leaf_bound", deep_default))
    for height in range(1, max_height + 1):
        for k in range(leaf_bound + 1):
            weight = deep_extra if k <= deep_leaves else extra
            yield from decorated_trees(height, k, weight)


def _run_pruning(params: dict, seed: int) -> _Tally:
    """Unique factorization of leaf-bijective maps through the pruning unit.

    The tree family covers every healthy tree up to the leaf bound plus
    all single leafless graftings (and double graftings at small leaf
    counts); targets range over all healthy trees of matching height and
    leaf count.  Trees with at most ``direct_leaf_bound`` leaves run the
    wreath-level verifier and the leaf-row verifier side by side, with
    their hom-sets compared row for row against the direct enumeration;
    larger trees run the row verifier alone, whose reduction those
    comparisons (and the healthy-grid probe one size up) pin down.
    """
    leaf_bound = int(params.get("leaf_bound", 6))
    direct_bound = int(params.get("direct_leaf_bound", 4))
    probe_bound = int(params.get("probe_leaf_bound", 5))
    max_height = int(params.get("max_height", 3))
    tally = _Tally()
    for height in range(1, max_height + 1):
        for k in range(probe_bound + 1):
            grid = healthy_trees(height, k)
            agreements = 0
            pairs = 0
            bad = None
            for s in grid:
                for t in grid:
                    direct = {leaf_row(m) for m in enumerate_theta_hom(s, t, "w")}
                    rows = w_hom_rows(s, t)
                    pairs += 1
                    if len(rows) == len(direct) and set(rows) == direct:
                        agreements += 1
                    elif bad is None:
                        bad = f"{format_tree(s)} -> {format_tree(t)}"
            tally.record(
                f"row/direct agreement on the healthy ({height},{k}) grid",
                agreements == pairs,
                detail=bad,
            )
    for tree in _decoration_family(params, leaf_default=6, deep_default=3):
        bound = max(leaf_bound, tree.leaf_count)
        rows_report = verify_initiality_by_rows(tree, leaf_bound=bound)
        ok = rows_report.passed
        detail = rows_report.counterexample
        if ok and tree.leaf_count <= direct_bound:
            direct_report = verify_initiality(tree, leaf_bound=bound)
            if not direct_report.passed:
                ok = False
                detail = direct_report.counterexample
            else:
                for target in healthy_trees(tree.height, tree.leaf_count):
                    direct = {
                        leaf_row(m)
                        for m in enumerate_theta_hom(tree, target, "w")
                    }
                    rows = w_hom_rows(tree, target)
                    if len(rows) != len(direct) or set(rows) != direct:
                        ok = False
                        detail = (
                            "hom rows disagree with the enumeration for "
                            f"{format_tree(tree)} -> {format_tree(target)}"
                        )
                        break
        tally.record(
            f"tree {format_tree(tree)} height {tree.height}",
            ok,
            detail=detail,
        )
    return tally


# ---------------------------------------------------------------------------
# geometric round trip


def _run_roundtrip(params: dict, seed: int) -> _Tally:
    tally = _Tally()
    for tree in _decoration_family(params, leaf_default=8, deep_default=4):
        back = tree_of_configuration(realize_tree(tree))
        expected = prune(tree).pruned
        ok = back == expected
        if ok and tree.is_healthy:
            ok = back == tree
        tally.record(
            f"tree {format_tree(tree)} height {tree.height}",
            ok,
            detail=f"round trip gave {format_tree(back)}",
        )
    return tally


# ---------------------------------------------------------------------------
# homology fixtures and engine sanity


def ordered_betti_oracle(n: int, k: int) -> tuple[int, ...]:
    """Coefficients of the ordered configuration Poincaré polynomial.

    The product over i < k of (1 + i t^(n-1)), exact integers; degree d
    Betti number of the space of k labeled points in R^n.
    """
    poly = [1]
    for i in range(1, k):
        shifted = [0] * (n - 1) + [i * c for c in poly]
        width = max(len(poly), len(shifted))
        poly = [
            (poly[d] if d < len(poly) else 0)
            + (shifted[d] if d < len(shifted) else 0)
            for d in range(width)
        ]
    return tuple(poly)


UNORDERED_FIXTURES = {
    (2, 2): ((1, 1, 0, 0), ((), (), (), ())),
    (2, 3): ((1, 1, 0, 0), ((), (), (), ())),
    (3, 2): ((1, 0, 0, 0), ((), (2,), (), ())),
}

ORDERED_CASES = ((1, 2), (1, 3), (2, 2), (2, 3), (3, 2))


def _pad(values: tuple[int, ...], length: int) -> tuple[int, ...]:
    return tuple(values[d] if d < len(values) else 0 for d in range(length))


def _boundary_squares(matrices) -> bool:
    return all(
        matrices[d].multiply(matrices[d + 1]).is_zero()
        for d in range(len(matrices) - 1)
    )


def bareiss_determinant(rows: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; exact integer determinant."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def minor_gcd(matrix: IntegerMatrix, d: int) -> int:
    """gcd of all d x d minors (0 when every minor vanishes)."""
    from itertools import combinations

    if d == 0:
        return 1
    best = 0
    for row_set in combinations(range(matrix.rows), d):
        for col_set in combinations(range(matrix.cols), d):
            sub = [[matrix.entries[i][j] for j in col_set] for i in row_set]
            best = gcd(best, bareiss_determinant(sub))
            if best == 1:
                return 1
    return best


def _snf_agrees_with_minors(matrix: IntegerMatrix) -> tuple[bool, str | None]:
    form = smith_normal_form(matrix)
    for a, b in zip(form.divisors, form.divisors[1:]):
        if a <= 0 or b % a != 0:
            return False, f"divisors {form.divisors} not a chain"
    product = 1
    for d, divisor in enumerate(form.divisors, start=1):
        product *= divisor
        if minor_gcd(matrix, d) != product:
            return False, f"minor gcd at size {d} is not {product}"
    if form.rank < min(matrix.rows, matrix.cols):
        if minor_gcd(matrix, form.rank + 1) != 0:
            return False, f"rank {form.rank} too small"
    return True, None


def _run_homology(params: dict, seed: int) -> _Tally:
    max_degree = int(params.get("max_degree", 3))
    matrices_requested = int(params.get("matrices", 200))
    kind = params.get("kind")
    tally = _Tally()

    if kind is not None:
        n = int(params["n"])
        k = int(params["k"])
        _homology_case(tally, kind, n, k, max_degree)
        return tally

    for n, k in ORDERED_CASES:
        _homology_case(tally, "nord", n, k, max_degree)
    for n, k in UNORDERED_FIXTURES:
        _homology_case(tally, "w_hlt", n, k, max_degree)

    for length in range(0, 5):
        cat = chain_poset(length)
        result = homology_of_cached(cat, max_degree)
        tally.record(
            f"chain poset length {length}",
            result.betti == _pad((1,), max_degree + 1)
            and all(not t for t in result.torsion),
            detail=str(result),
        )

    circle = poset_category("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
    result = homology_of_cached(circle, max_degree)
    tally.record(
        "two-minima two-maxima poset",
        result.betti == _pad((1, 1), max_degree + 1)
        and all(not t for t in result.torsion),
        detail=str(result),
    )

    rng = Random(seed)
    for index in range(matrices_requested):
        rows = rng.randint(1, 8)
        cols = rng.randint(1, 8)
        matrix = IntegerMatrix.from_rows(
            [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)],
            cols,
        )
        ok, why = _snf_agrees_with_minors(matrix)
        tally.record(f"random matrix {index} ({rows}x{cols})", ok, detail=why)

    for label, builder in (
        ("nord22", lambda: build_category("nord", 2, 2)),
        ("w_hlt32", lambda: build_category("w_hlt", 3, 2)),
    ):
        cat = builder()
        base = homology_of_cached(cat, max_degree)
        perm = list(range(len(cat.objects)))
        Random(seed + 1).shuffle(perm)
        moved = homology_of_cached(cat.permuted(tuple(perm)), max_degree)
        tally.record(
            f"object order invariance {label}",
            base.betti == moved.betti and base.torsion == moved.torsion,
            detail=f"{base} vs {moved}",
        )
    return tally


def homology_of_cached(
    cat: FiniteCategoryView, max_degree: int
) -> HomologyResult:
    """Homology plus the boundary-square check in one pass."""
    matrices = nerve_chain_complex(cat, max_degree + 1, DEFAULT_CHAIN_CAP)
    if not _boundary_squares(matrices):
        raise AssertionError("boundary of boundary is nonzero")
    return homology_from_boundaries(matrices, max_degree)


def _homology_case(
    tally: _Tally, kind: str, n: int, k: int, max_degree: int
) -> None:
    cat = build_category(kind, n, k)
    validation = cat.validate()
    result = homology_of_cached(cat, max_degree)
    if kind == "nord":
        expected_betti = _pad(ordered_betti_oracle(n, k), max_degree + 1)
        expected_torsion = tuple(() for _ in range(max_degree + 1))
    else:
        expected_betti, expected_torsion = UNORDERED_FIXTURES[(n, k)]
        expected_betti = _pad(expected_betti, max_degree + 1)
        expected_torsion = tuple(
            expected_torsion[d] if d < len(expected_torsion) else ()
            for d in range(max_degree + 1)
        )
    ok = (
        validation.ok
        and result.betti == expected_betti
        and result.torsion == expected_torsion
    )
    tally.record(
        f"{kind} n={n} k={k}",
        ok,
        detail=f"got {result} expected betti {expected_betti} "
        f"torsion {expected_torsion} (category valid: {validation.ok}, "
        f"max hom size {cat.max_hom_size})",
    )


# ---------------------------------------------------------------------------
# simplicial-circle laws


def _run_delta_laws(params: dict, seed: int) -> _Tally:
    max_rank = int(params.get("max_rank", 5))
    compose_rank = int(params.get("compose_rank", 4))
    tally = _Tally()

    for p in range(max_rank + 1):
        for q in range(max_rank + 1):
            homs = enumerate_delta_hom(p, q)
            # Constant maps all share the all-basepoint image, and they are
            # the only collisions; every non-constant map is pinned down by
            # its circle, and active maps in particular are.
            constants = [f for f in homs if f.values[0] == f.values[-1]]
            rest = [f for f in homs if f.values[0] != f.values[-1]]
            rest_images = {simplicial_circle(f).pairs for f in homs}
            sharp = len(rest_images) == len(rest) + (1 if constants else 0)
            sharp = sharp and all(
                simplicial_circle(f).pairs == () for f in constants
            )
            tally.record(
                f"injectivity p={p} q={q}",
                sharp,
                detail=f"{len(homs)} maps, {len(rest_images)} images, "
                f"{len(constants)} constants",
            )
            actives = [f for f in homs if f.is_active]
            active_images = {simplicial_circle(f).pairs for f in actives}
            tally.record(
                f"active injectivity p={p} q={q}",
                len(active_images) == len(actives),
                detail=f"{len(actives)} active maps, "
                f"{len(active_images)} images",
            )
            totals = sum(1 for f in homs if simplicial_circle(f).is_total)
            matched = all(
                f.is_active == simplicial_circle(f).is_total for f in homs
            )
            tally.record(
                f"active equivalence p={p} q={q}",
                matched and len(actives) == totals,
                detail=f"{len(actives)} active vs {totals} total",
            )

    for p in range(compose_rank + 1):
        for q in range(compose_rank + 1):
            inner = enumerate_delta_hom(p, q)
            for r in range(compose_rank + 1):
                outer = enumerate_delta_hom(q, r)
                ok = True
                witness = None
                for f in inner:
                    gamma_f = simplicial_circle(f)
                    for g in outer:
                        left = simplicial_circle(compose_delta(g, f))
                        right = compose_pointed(gamma_f, simplicial_circle(g))
                        if left != right:
                            ok = False
                            witness = f"f={f} g={g}"
                            break
                    if not ok:
                        break
                tally.record(
                    f"contravariance p={p} q={q} r={r}", ok, detail=witness
                )
    return tally


# ---------------------------------------------------------------------------
# fixture tables


def emit_fixture_tables() -> str:
    """The homology oracle tables in one delimited, human-readable page."""
    lines = [
        "# Homology fixtures",
        "",
        "## Ordered configurations (labeled points)",
        "Betti numbers are coefficients of prod_{i=1}^{k-1} (1 + i t^(n-1)),",
        "the classical Poincare polynomial of k labeled points in R^n",
        "(Arnold's computation for the plane, extending to all n).",
        "",
        "n\tk\tbetti (degrees 0..3)",
    ]
    for n, k in ORDERED_CASES:
        betti = _pad(ordered_betti_oracle(n, k), 4)
        lines.append(f"{n}\t{k}\t{','.join(str(b) for b in betti)}")
    lines.extend(
        [
            "",
            "## Unordered configurations (indistinguishable points)",
            "n\tk\tgroups (H_0, H_1, H_2)\tprovenance",
        ]
    )
    notes = {
        (2, 2): "two plane points up to swap: homotopy circle (angle mod pi)",
        (2, 3): "braid group B_3 classifying space: H_1 = Z (abelianization),"
        " H_2 = 0",
        (3, 2): "two space points up to swap: RP^2, torsion Z/2 in degree 1",
    }
    display = {(2, 2): "(Z, Z, 0)", (2, 3): "(Z, Z, 0)", (3, 2): "(Z, Z/2, 0)"}
    for key in sorted(UNORDERED_FIXTURES):
        n, k = key
        lines.append(f"{n}\t{k}\t{display[key]}\t{notes[key]}")
    lines.extend(
        [
            "",
            "## Degenerate line cases",
            "Configurations in R^1 have contractible components indexed by",
            "orderings: k labeled points give k! components, so all Betti",
            "mass sits in degree 0.",
            "",
        ]
    )
    return "\n".join(lines)
