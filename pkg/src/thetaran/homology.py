"""Finite categories, their nerves, and integral homology via Smith form.

The bridge from combinatorics to topology: a finite category presented as
an object list, a morphism list, and a composition table has a normalized
nerve whose d-chains are composable strings of d non-identity morphisms.
Boundary matrices over the integers feed a Smith normal form routine, and
Betti numbers plus torsion coefficients drop out degree by degree.

Two category builders connect back to the tree machinery: ``nord`` takes
healthy height-n trees with leaves labeled by {1..k} and the active
leaf-label-preserving morphisms between them, and ``w_hlt`` takes the
unlabeled healthy trees with all active leaf-bijective morphisms.  Their
classifying spaces have the homology of ordered and unordered
configuration spaces of k points in R^n, which is what the acceptance
fixtures check.

Everything is exact: arbitrary-precision integers, no floats, no modular
shortcuts.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from random import Random

from .theta import (
    DEFAULT_HOM_CAP,
    ResourceCapError,
    ThetaMorphism,
    Tree,
    compose_theta,
    enumerate_theta_hom,
    format_tree,
    healthy_trees,
    identity_theta,
    leaf_row,
)

DEFAULT_CHAIN_CAP = 500_000


# ---------------------------------------------------------------------------
# integer matrices and Smith normal form


@dataclass(frozen=True)
class IntegerMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("column count mismatch")

    @classmethod
    def from_rows(cls, data, cols: int | None = None) -> IntegerMatrix:
        rows = [tuple(int(v) for v in row) for row in data]
        if cols is None:
            if not rows:
                raise ValueError("cannot infer width of an empty matrix")
            cols = len(rows[0])
        return cls(len(rows), cols, tuple(rows))

    def multiply(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.cols != other.rows:
            raise ValueError("inner dimensions disagree")
        out = []
        for i in range(self.rows):
            row = self.entries[i]
            out.append(
                tuple(
                    sum(row[k] * other.entries[k][j] for k in range(self.cols))
                    for j in range(other.cols)
                )
            )
        return IntegerMatrix(self.rows, other.cols, tuple(out))

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.entries for v in row)


@dataclass(frozen=True)
class SmithNormalForm:
    divisors: tuple[int, ...]  # positive, each dividing the next
    rank: int


def smith_normal_form(matrix: IntegerMatrix) -> SmithNormalForm:
    """Elementary divisors by integer row and column reduction.

    Pivots are chosen smallest in magnitude; after clearing a cross, the
    pivot is forced to divide the remaining block (a row addition brings
    any offender into play, shrinking the pivot).  Divisors come out
    positive and in a divisibility chain.
    """
    rows, cols = matrix.rows, matrix.cols
    a = [list(row) for row in matrix.entries]
    divisors: list[int] = []
    t = 0
    while t < min(rows, cols):
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = a[i][j]
                if v != 0 and (pivot is None or abs(v) < abs(pivot[2])):
                    pivot = (i, j, v)
        if pivot is None:
            break
        pi, pj, _ = pivot
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            if not _clear_cross(a, t, rows, cols):
                offender = _nondivisible(a, t, rows, cols)
                if offender is None:
                    break
                for j in range(t, cols):
                    a[t][j] += a[offender][j]
        if a[t][t] < 0:
            a[t] = [-v for v in a[t]]
        divisors.append(a[t][t])
        t += 1
    return SmithNormalForm(tuple(divisors), len(divisors))


def _clear_cross(a, t: int, rows: int, cols: int) -> bool:
    """One pass of clearing row t and column t; True when work remains."""
    changed = False
    for i in range(t + 1, rows):
        if a[i][t] != 0:
            q = a[i][t] // a[t][t]
            for j in range(t, cols):
                a[i][j] -= q * a[t][j]
            if a[i][t] != 0:
                a[t], a[i] = a[i], a[t]  # strictly smaller pivot
            changed = True
    if changed:
        return True
    for j in range(t + 1, cols):
        if a[t][j] != 0:
            q = a[t][j] // a[t][t]
            for i in range(rows):
                a[i][j] -= q * a[i][t]
            if a[t][j] != 0:
                for row in a:
                    row[t], row[j] = row[j], row[t]
            changed = True
    return changed


def _nondivisible(a, t: int, rows: int, cols: int) -> int | None:
    p = a[t][t]
    for i in range(t + 1, rows):
        for j in range(t + 1, cols):
            if a[i][j] % p != 0:
                return i
    return None


# ---------------------------------------------------------------------------
# finite categories


@dataclass(frozen=True, eq=False)
class FiniteCategoryView:
    """A category as plain data: objects, arrows, and a composition table.

    ``morphisms[m]`` is (source index, target index, label); ``identities``
    picks the identity arrow of each object; ``composition`` maps the pair
    (second, first) of composable arrow indices to their composite's index.
    """

    objects: tuple
    morphisms: tuple[tuple[int, int, object], ...]
    identities: tuple[int, ...]
    composition: dict[tuple[int, int], int]

    def source(self, m: int) -> int:
        return self.morphisms[m][0]

    def target(self, m: int) -> int:
        return self.morphisms[m][1]

    def is_identity(self, m: int) -> bool:
        return self.identities[self.morphisms[m][0]] == m

    def compose(self, second: int, first: int) -> int:
        return self.composition[(second, first)]

    @cached_property
    def hom_index(self) -> dict[tuple[int, int], tuple[int, ...]]:
        buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
        for m, (a, b, _) in enumerate(self.morphisms):
            buckets[(a, b)].append(m)
        return {key: tuple(ms) for key, ms in buckets.items()}

    def hom(self, a: int, b: int) -> tuple[int, ...]:
        return self.hom_index.get((a, b), ())

    @cached_property
    def max_hom_size(self) -> int:
        return max((len(ms) for ms in self.hom_index.values()), default=0)

    @cached_property
    def outgoing_non_identity(self) -> tuple[tuple[int, ...], ...]:
        buckets: list[list[int]] = [[] for _ in self.objects]
        for m, (a, _, _) in enumerate(self.morphisms):
            if not self.is_identity(m):
                buckets[a].append(m)
        return tuple(tuple(ms) for ms in buckets)

    def permuted(self, perm: tuple[int, ...]) -> FiniteCategoryView:
        """Relabel object positions: object i moves to position perm[i]."""
        size = len(self.objects)
        new_objects: list = [None] * size
        new_identities = [0] * size
        for i in range(size):
            new_objects[perm[i]] = self.objects[i]
            new_identities[perm[i]] = self.identities[i]
        new_morphisms = tuple(
            (perm[a], perm[b], label) for a, b, label in self.morphisms
        )
        return FiniteCategoryView(
            tuple(new_objects),
            new_morphisms,
            tuple(new_identities),
            dict(self.composition),
        )

    def validate(self, triple_limit: int = 20_000, seed: int = 0) -> CategoryValidation:
        """Identity and closure laws in full, associativity up to a limit."""
        for i, m in enumerate(self.identities):
            if self.morphisms[m][0] != i or self.morphisms[m][1] != i:
                return CategoryValidation(False, False, False, 0, True)
        identities_ok = True
        for m, (a, b, _) in enumerate(self.morphisms):
            if self.composition.get((m, self.identities[a])) != m:
                identities_ok = False
            if self.composition.get((self.identities[b], m)) != m:
                identities_ok = False
        composition_ok = True
        pairs = []
        for f, (_, b, _) in enumerate(self.morphisms):
            for g in range(len(self.morphisms)):
                if self.morphisms[g][0] != b:
                    continue
                pairs.append((g, f))
                comp = self.composition.get((g, f))
                if comp is None:
                    composition_ok = False
                    continue
                ca, cb, _ = self.morphisms[comp]
                if ca != self.morphisms[f][0] or cb != self.morphisms[g][1]:
                    composition_ok = False
        triples = []
        for g, f in pairs:
            for h in range(len(self.morphisms)):
                if self.morphisms[h][0] == self.morphisms[g][1]:
                    triples.append((h, g, f))
        exhaustive = len(triples) <= triple_limit
        if not exhaustive:
            rng = Random(seed)
            triples = [triples[rng.randrange(len(triples))] for _ in range(triple_limit)]
        associativity_ok = composition_ok
        checked = 0
        if composition_ok:
            for h, g, f in triples:
                checked += 1
                left = self.composition[(h, self.composition[(g, f)])]
                right = self.composition[(self.composition[(h, g)], f)]
                if left != right:
                    associativity_ok = False
                    break
        return CategoryValidation(
            identities_ok, composition_ok, associativity_ok, checked, exhaustive
        )


@dataclass(frozen=True)
class CategoryValidation:
    identities_ok: bool
    composition_ok: bool
    associativity_ok: bool
    triples_checked: int
    exhaustive: bool

    @property
    def ok(self) -> bool:
        return self.identities_ok and self.composition_ok and self.associativity_ok


def poset_category(elements, relations) -> FiniteCategoryView:
    """The category of a poset given by generating relations a <= b.

    The reflexive-transitive closure is computed here, so only covering
    relations need to be supplied.
    """
    elements = tuple(elements)
    index = {e: i for i, e in enumerate(elements)}
    size = len(elements)
    leq = [[False] * size for _ in range(size)]
    for i in range(size):
        leq[i][i] = True
    for a, b in relations:
        leq[index[a]][index[b]] = True
    for k in range(size):
        for i in range(size):
            if leq[i][k]:
                row_k = leq[k]
                row_i = leq[i]
                for j in range(size):
                    if row_k[j]:
                        row_i[j] = True
    morphisms = []
    arrow = {}
    for i in range(size):
        for j in range(size):
            if leq[i][j]:
                arrow[(i, j)] = len(morphisms)
                morphisms.append((i, j, (elements[i], elements[j])))
    identities = tuple(arrow[(i, i)] for i in range(size))
    composition = {}
    for (i, j), f in arrow.items():
        for (j2, k), g in arrow.items():
            if j2 == j:
                composition[(g, f)] = arrow[(i, k)]
    return FiniteCategoryView(elements, tuple(morphisms), identities, composition)


def chain_poset(length: int) -> FiniteCategoryView:
    """The totally ordered poset 0 < 1 < ... < length."""
    return poset_category(
        range(length + 1), [(i, i + 1) for i in range(length)]
    )


# ---------------------------------------------------------------------------
# tree categories


_KINDS = ("nord", "w_hlt")


def build_category(
    kind: str, n: int, k: int, cap: int = DEFAULT_HOM_CAP
) -> FiniteCategoryView:
    """Configuration categories on healthy height-n trees with k leaves.

    ``w_hlt``: unlabeled trees, all active leaf-bijective morphisms.
    ``nord``: trees with leaves labeled by {1..k} (an object per tree and
    labeling), morphisms the active morphisms matching labels along the
    leaf map.  Objects and morphisms are listed in a fixed enumeration
    order, so rebuilt categories are identical.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown category kind {kind!r}; pick from {_KINDS}")
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    trees = healthy_trees(n, k)
    if kind == "w_hlt":
        objects: list = list(trees)
        arrows = [
            (a, b, m)
            for a, tree_a in enumerate(trees)
            for b, tree_b in enumerate(trees)
            for m in enumerate_theta_hom(tree_a, tree_b, "w", cap)
        ]
    else:
        labelings = tuple(permutations(range(1, k + 1)))
        objects = [(tree, lab) for tree in trees for lab in labelings]
        arrows = []
        for a, (tree_a, lab_a) in enumerate(objects):
            for b, (tree_b, lab_b) in enumerate(objects):
                for m in enumerate_theta_hom(tree_a, tree_b, "w", cap):
                    row = leaf_row(m)
                    if all(
                        lab_a[row[x] - 1] == lab_b[x] for x in range(len(row))
                    ):
                        arrows.append((a, b, m))
    arrow_index = {(a, b, m): idx for idx, (a, b, m) in enumerate(arrows)}
    identities = []
    for idx, obj in enumerate(objects):
        tree = obj[0] if kind == "nord" else obj
        identities.append(arrow_index[(idx, idx, identity_theta(tree))])
    composition = {}
    for f_idx, (a, b, f) in enumerate(arrows):
        for g_idx, (b2, c, g) in enumerate(arrows):
            if b2 != b:
                continue
            composition[(g_idx, f_idx)] = arrow_index[(a, c, compose_theta(g, f))]
    return FiniteCategoryView(
        tuple(objects), tuple(arrows), tuple(identities), composition
    )


def describe_object(obj) -> str:
    if isinstance(obj, Tree):
        return format_tree(obj)
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], Tree):
        tree, labeling = obj
        return f"{format_tree(tree)} labels={list(labeling)}"
    return repr(obj)


# ---------------------------------------------------------------------------
# nerves and homology


def _nerve_bases(
    cat: FiniteCategoryView, max_dim: int, cap: int
) -> list[tuple]:
    """Composable strings of non-identity arrows, degree by degree."""
    bases: list[tuple] = [tuple(range(len(cat.objects)))]
    total = len(bases[0])
    current: tuple = tuple((m,) for a in range(len(cat.objects))
                           for m in cat.outgoing_non_identity[a])
    for d in range(1, max_dim + 1):
        bases.append(current)
        total += len(current)
        if total > cap:
            raise ResourceCapError(
                f"nerve exceeds {cap} cells by dimension {d}"
            )
        if d == max_dim:
            break
        extended = []
        for chain in current:
            tip = cat.target(chain[-1])
            for m in cat.outgoing_non_identity[tip]:
                extended.append(chain + (m,))
        current = tuple(extended)
    return bases


def nerve_chain_complex(
    cat: FiniteCategoryView, max_dim: int, cap: int = DEFAULT_CHAIN_CAP
) -> list[IntegerMatrix]:
    """Boundary matrices of the normalized nerve, degrees 1..max_dim.

    A d-chain is a string of d composable non-identity arrows; the i-th
    face composes at the i-th joint, and faces that produce an identity
    vanish in the normalized complex.
    """
    bases = _nerve_bases(cat, max_dim, cap)
    matrices = []
    for d in range(1, max_dim + 1):
        lower = bases[d - 1]
        upper = bases[d]
        position = {chain: i for i, chain in enumerate(lower)}
        columns: list[dict[int, int]] = []
        for chain in upper:
            coeffs: dict[int, int] = defaultdict(int)
            if d == 1:
                coeffs[cat.target(chain[0])] += 1
                coeffs[cat.source(chain[0])] -= 1
            else:
                coeffs[position[chain[1:]]] += 1
                sign = -1
                for i in range(1, d):
                    composite = cat.compose(chain[i], chain[i - 1])
                    if not cat.is_identity(composite):
                        face = chain[: i - 1] + (composite,) + chain[i + 1 :]
                        coeffs[position[face]] += sign
                    sign = -sign
                coeffs[position[chain[:-1]]] += sign
            columns.append(coeffs)
        entries = tuple(
            tuple(columns[j].get(i, 0) for j in range(len(upper)))
            for i in range(len(lower))
        )
        matrices.append(IntegerMatrix(len(lower), len(upper), entries))
    return matrices


@dataclass(frozen=True)
class HomologyResult:
    """Integral homology through ``max_degree``.

    ``betti[d]`` and ``torsion[d]`` describe H_d; torsion coefficients are
    each > 1 and form a divisibility chain.  ``chain_sizes`` lists the
    nerve basis sizes for dimensions 0..max_degree+1, the range actually
    built.
    """

    max_degree: int
    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]
    chain_sizes: tuple[int, ...]

    def group(self, d: int) -> str:
        parts = []
        if self.betti[d] == 1:
            parts.append("Z")
        elif self.betti[d] > 1:
            parts.append(f"Z^{self.betti[d]}")
        parts.extend(f"Z/{t}" for t in self.torsion[d])
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        inner = ", ".join(self.group(d) for d in range(self.max_degree + 1))
        return f"({inner})"


def homology_of_category(
    cat: FiniteCategoryView,
    max_degree: int = 3,
    cap: int = DEFAULT_CHAIN_CAP,
) -> HomologyResult:
    """H_0..H_max_degree of the classifying space of the category.

    Builds the nerve one dimension past max_degree so that the top
    requested degree sees its incoming boundary.
    """
    matrices = nerve_chain_complex(cat, max_degree + 1, cap)
    return homology_from_boundaries(matrices, max_degree)


def homology_from_boundaries(
    matrices: list[IntegerMatrix], max_degree: int
) -> HomologyResult:
    """Homology of a chain complex given as boundaries for degrees 1..D+1."""
    if len(matrices) < max_degree + 1:
        raise ValueError(
            f"need boundaries through degree {max_degree + 1}, got {len(matrices)}"
        )
    sizes = [matrices[0].rows] + [m.cols for m in matrices]
    forms = [smith_normal_form(m) for m in matrices]
    ranks = [0] + [f.rank for f in forms]  # ranks[d] = rank of boundary from degree d
    betti = []
    torsion = []
    for d in range(max_degree + 1):
        betti_d = sizes[d] - ranks[d] - ranks[d + 1]
        if betti_d < 0:
            raise AssertionError("negative Betti number; the complex is broken")
        betti.append(betti_d)
        torsion.append(tuple(v for v in forms[d].divisors if v > 1))
    return HomologyResult(
        max_degree, tuple(betti), tuple(torsion), tuple(sizes)
    )
