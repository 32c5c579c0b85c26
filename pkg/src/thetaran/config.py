"""Finite rational point configurations and straight-line exit paths.

A configuration is a finite set of distinct points in Q^n.  Projecting
away trailing coordinates one at a time turns it into a planar level tree
of height n: level k collects the distinct length-k coordinate prefixes,
ordered by the standard order of Q, and the leaves are the points
themselves in lexicographic order.

An exit path from a configuration S to a configuration T assigns each
target point an origin in S and moves it there-to-here along a straight
line, p_t(u) = (1-u) f(t) + u t.  The path is valid when, at every
projection level, strands that end apart stay apart on (0, 1] (they may
share their start: points split instantly) and strands that end together
started together.  Validation is exact: every collision test solves a
rational linear system, and floating point never enters a verdict.

A valid path induces a morphism of the two trees one level at a time: the
base map counts, for each source prefix, how many target prefixes sit
over it, and the components recurse into the matched fibers with the
leading coordinate dropped.  The leaf map of the resulting morphism is
exactly the point assignment, read target-to-source.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from random import Random

from .theta import MonotoneMap, ThetaMorphism, Tree, empty_tree, leaf_row

Point = tuple[Fraction, ...]


class SamplingBudgetError(RuntimeError):
    """Raised when rejection sampling exhausts its attempt budget."""


class InvalidExitPathError(ValueError):
    """Raised when a path without a passing certificate is used."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class Configuration:
    """Distinct points in Q^n, stored sorted lexicographically.

    Construction canonicalizes the order and coerces coordinates to exact
    rationals; coincident points are rejected, not repaired.
    """

    dimension: int
    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("dimension must be at least 1")
        cleaned = []
        for point in self.points:
            if len(point) != self.dimension:
                raise ValueError(
                    f"point {point} does not have {self.dimension} coordinates"
                )
            cleaned.append(tuple(_as_fraction(c) for c in point))
        cleaned.sort()
        for a, b in zip(cleaned, cleaned[1:]):
            if a == b:
                raise ValueError(f"coincident point {a}")
        object.__setattr__(self, "points", tuple(cleaned))

    @property
    def size(self) -> int:
        return len(self.points)

    def __str__(self) -> str:
        inner = ", ".join(
            "(" + ", ".join(str(c) for c in p) + ")" for p in self.points
        )
        return "{" + inner + "}"


def configuration(dimension: int, points) -> Configuration:
    return Configuration(dimension, tuple(tuple(p) for p in points))


def rescale_configuration(cfg: Configuration, factor) -> Configuration:
    factor = _as_fraction(factor)
    if factor == 0:
        raise ValueError("rescaling factor must be nonzero")
    return Configuration(
        cfg.dimension,
        tuple(tuple(factor * c for c in p) for p in cfg.points),
    )


# ---------------------------------------------------------------------------
# the configuration-to-tree functor on objects


def tree_of_configuration(cfg: Configuration) -> Tree:
    """The height-n tree of coordinate prefixes, ordered by Q."""
    return _tree_of_points(cfg.points, cfg.dimension)


def _tree_of_points(points: tuple[Point, ...], dimension: int) -> Tree:
    if not points:
        return empty_tree(dimension)
    if dimension == 1:
        return Tree(1, len(points))
    children = []
    for _, fiber in _fibers(points):
        children.append(_tree_of_points(fiber, dimension - 1))
    return Tree(dimension, len(children), tuple(children))


def _fibers(points: tuple[Point, ...]) -> list[tuple[Fraction, tuple[Point, ...]]]:
    """Group sorted points by first coordinate and drop it, order kept."""
    out: list[tuple[Fraction, tuple[Point, ...]]] = []
    current: Fraction | None = None
    bucket: list[Point] = []
    for point in points:
        if point[0] != current:
            if bucket:
                out.append((current, tuple(bucket)))
            current = point[0]
            bucket = []
        bucket.append(point[1:])
    if bucket:
        out.append((current, tuple(bucket)))
    return out


def realize_tree(tree: Tree) -> Configuration:
    """An integer-coordinate configuration whose tree is prune(tree).

    Child s of the root contributes first coordinate s; leafless branches
    leave no points behind, so only the pruned shape survives the round
    trip, and healthy trees come back exactly.
    """
    return Configuration(tree.height, tuple(_realize(tree)))


def _realize(tree: Tree) -> list[Point]:
    if tree.height == 1:
        return [(Fraction(i),) for i in range(1, tree.rank + 1)]
    out: list[Point] = []
    for s, child in enumerate(tree.children, start=1):
        first = Fraction(s)
        out.extend((first,) + p for p in _realize(child))
    return out


# ---------------------------------------------------------------------------
# exit paths and validation


@dataclass(frozen=True)
class LevelCheck:
    """Diagnostics for one projection level.

    ``collision`` holds (target index, target index, time u) for the first
    pair of separated strands meeting at some u in (0, 1]; ``incompatible``
    holds the first target pair ending together whose origins differ at
    this level.  Indices are 0-based into the canonical point order.
    """

    level: int
    separation_ok: bool
    compatibility_ok: bool
    collision: tuple[int, int, Fraction] | None = None
    incompatible: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.separation_ok and self.compatibility_ok


@dataclass(frozen=True)
class PathVerdict:
    valid: bool
    levels: tuple[LevelCheck, ...]


@dataclass(frozen=True)
class ExitPath:
    """A straight-line path datum with an optional validity certificate.

    ``mapping[t]`` is the canonical index of the source point that target
    point t travels from.  The certificate is only ever attached by
    ``build_exit_path`` after running the validator.
    """

    source: Configuration
    target: Configuration
    mapping: tuple[int, ...]
    verdict: PathVerdict | None = None

    def __post_init__(self) -> None:
        if self.source.dimension != self.target.dimension:
            raise ValueError("exit path endpoints must share a dimension")
        if len(self.mapping) != self.target.size:
            raise ValueError(
                f"mapping covers {len(self.mapping)} of {self.target.size} "
                "target points"
            )
        for idx in self.mapping:
            if not (0 <= idx < self.source.size):
                raise ValueError(f"mapping index {idx} out of range")

    @property
    def dimension(self) -> int:
        return self.source.dimension

    @cached_property
    def is_point_bijection(self) -> bool:
        return (
            self.source.size == self.target.size
            and len(set(self.mapping)) == self.target.size
        )


def validate_exit_path(
    source: Configuration, target: Configuration, mapping: tuple[int, ...]
) -> PathVerdict:
    """Exact per-level validation of the straight-line path.

    Level k checks, with prefixes p[:k]: (a) target pairs with distinct
    prefixes never share one at any u in (0, 1]; (b) target pairs with
    equal prefixes have origins with equal prefixes.
    """
    path = ExitPath(source, target, tuple(mapping))
    levels = []
    for k in range(1, source.dimension + 1):
        levels.append(_check_level(path, k))
    return PathVerdict(all(lv.ok for lv in levels), tuple(levels))


def _check_level(path: ExitPath, k: int) -> LevelCheck:
    tgt = path.target.points
    src = path.source.points
    collision = None
    incompatible = None
    for a in range(len(tgt)):
        for b in range(a + 1, len(tgt)):
            t_pref = tgt[a][:k]
            u_pref = tgt[b][:k]
            fa = src[path.mapping[a]][:k]
            fb = src[path.mapping[b]][:k]
            if t_pref == u_pref:
                if incompatible is None and fa != fb:
                    incompatible = (a, b)
                continue
            if collision is not None:
                continue
            hit = _strand_collision(fa, fb, t_pref, u_pref)
            if hit is not None:
                collision = (a, b, hit)
    return LevelCheck(
        level=k,
        separation_ok=collision is None,
        compatibility_ok=incompatible is None,
        collision=collision,
        incompatible=incompatible,
    )


def _strand_collision(
    start_a: Point, start_b: Point, end_a: Point, end_b: Point
) -> Fraction | None:
    """First u in (0, 1] where (1-u) start + u end coincide, if any.

    Coordinatewise the difference is linear in u; the strands meet exactly
    on the intersection of the coordinate solution sets.
    """
    root: Fraction | None = None
    for sa, sb, ea, eb in zip(start_a, start_b, end_a, end_b):
        a = sa - sb  # difference at u = 0
        b = ea - eb  # difference at u = 1
        if a == b:
            if a != 0:
                return None  # constant nonzero gap in this coordinate
            continue  # identically zero, no constraint
        candidate = a / (a - b)
        if root is None:
            root = candidate
        elif root != candidate:
            return None
    # some coordinate separates the prefixes at u = 1, so root is not None
    if root is not None and 0 < root <= 1:
        return root
    return None


def build_exit_path(
    source: Configuration, target: Configuration, mapping
) -> ExitPath:
    """Construct a path and attach its validation certificate."""
    mapping = tuple(mapping)
    verdict = validate_exit_path(source, target, mapping)
    return ExitPath(source, target, mapping, verdict)


def rescale_exit_path(path: ExitPath, factor) -> ExitPath:
    """Rescale both endpoints, re-indexing the mapping to canonical order."""
    factor = _as_fraction(factor)
    if factor == 0:
        raise ValueError("rescaling factor must be nonzero")
    src_scaled = [tuple(factor * c for c in p) for p in path.source.points]
    tgt_scaled = [tuple(factor * c for c in p) for p in path.target.points]
    src_order = sorted(range(len(src_scaled)), key=lambda i: src_scaled[i])
    tgt_order = sorted(range(len(tgt_scaled)), key=lambda i: tgt_scaled[i])
    src_rank = {old: new for new, old in enumerate(src_order)}
    mapping = tuple(
        src_rank[path.mapping[old]] for old in tgt_order
    )
    return build_exit_path(
        Configuration(path.dimension, tuple(src_scaled)),
        Configuration(path.dimension, tuple(tgt_scaled)),
        mapping,
    )


# ---------------------------------------------------------------------------
# the functor on morphisms


def morphism_of_exit_path(path: ExitPath) -> ThetaMorphism:
    """The tree morphism induced by a certified exit path."""
    if path.verdict is None or not path.verdict.valid:
        raise InvalidExitPathError(
            "morphisms are only extracted from paths with a passing certificate"
        )
    return induced_morphism(path.source, path.target, path.mapping)


def induced_morphism(
    source: Configuration, target: Configuration, mapping
) -> ThetaMorphism:
    """The combinatorial core: trees and matched fibers from the raw data.

    This works for any assignment whose level maps are well-defined and
    monotone, which covers certified paths and compositions of their
    assignments; both properties are checked and violations raise.
    """
    if source.dimension != target.dimension:
        raise ValueError("endpoints must share a dimension")
    mapping = tuple(mapping)
    return _induced(source.points, target.points, mapping, source.dimension)


def _induced(
    src: tuple[Point, ...],
    tgt: tuple[Point, ...],
    mapping: tuple[int, ...],
    dimension: int,
) -> ThetaMorphism:
    src_tree = _tree_of_points(src, dimension)
    tgt_tree = _tree_of_points(tgt, dimension)
    if dimension == 1:
        counts = [0] * len(src)
        for s_idx in mapping:
            counts[s_idx] += 1
        values = [0]
        for c in counts:
            values.append(values[-1] + c)
        # mapping must list origins in weakly increasing order, else the
        # cumulative count and the actual fibers disagree
        if any(mapping[x] > mapping[x + 1] for x in range(len(mapping) - 1)):
            raise ValueError("level map is not monotone")
        base = MonotoneMap(len(src), len(tgt), tuple(values))
        return ThetaMorphism(src_tree, tgt_tree, base)

    src_groups = _fibers(src)
    tgt_groups = _fibers(tgt)
    # position of each point inside its group, and each group's span
    src_group_of, src_local = _group_index(src_groups)
    tgt_group_of, tgt_local = _group_index(tgt_groups)

    level_map: list[int | None] = [None] * len(tgt_groups)
    for t_idx, s_idx in enumerate(mapping):
        j = tgt_group_of[t_idx]
        i = src_group_of[s_idx]
        if level_map[j] is None:
            level_map[j] = i
        elif level_map[j] != i:
            raise ValueError(
                f"target group {j} has origins in distinct source groups"
            )
    if any(v is None for v in level_map):
        raise ValueError("a target group received no origin")
    if any(level_map[j] > level_map[j + 1] for j in range(len(level_map) - 1)):
        raise ValueError("level map is not monotone")

    counts = [0] * len(src_groups)
    for i in level_map:
        counts[i] += 1
    values = [0]
    for c in counts:
        values.append(values[-1] + c)
    base = MonotoneMap(len(src_groups), len(tgt_groups), tuple(values))

    components = []
    for j, i in enumerate(level_map):
        sub_mapping = tuple(
            src_local[mapping[t_idx]]
            for t_idx in range(len(tgt))
            if tgt_group_of[t_idx] == j
        )
        components.append(
            _induced(src_groups[i][1], tgt_groups[j][1], sub_mapping, dimension - 1)
        )
    return ThetaMorphism(src_tree, tgt_tree, base, tuple(components))


def _group_index(groups) -> tuple[list[int], list[int]]:
    group_of: list[int] = []
    local: list[int] = []
    for g, (_, members) in enumerate(groups):
        for offset in range(len(members)):
            group_of.append(g)
            local.append(offset)
    return group_of, local


def compose_point_maps(
    second: tuple[int, ...], first: tuple[int, ...]
) -> tuple[int, ...]:
    """Origins of a two-step path: follow second's origins through first.

    ``first`` maps middle points to initial points, ``second`` maps final
    points to middle points; the composite maps final to initial.
    """
    return tuple(first[m] for m in second)


def path_flags(path: ExitPath) -> tuple[bool, bool]:
    """(leaf bijection, levelwise surjection with nonempty endpoints)."""
    bijective = path.is_point_bijection
    if path.source.size == 0 or path.target.size == 0:
        return bijective, False
    surjective = True
    src = path.source.points
    tgt = path.target.points
    for k in range(1, path.dimension + 1):
        hit = {src[path.mapping[t]][:k] for t in range(len(tgt))}
        all_prefixes = {p[:k] for p in src}
        if hit != all_prefixes:
            surjective = False
            break
    return bijective, surjective


# ---------------------------------------------------------------------------
# seeded generators


def random_configuration(
    dimension: int, size: int, seed: int, budget: int = 10_000
) -> Configuration:
    """Distinct integer-grid points in a box, rejection sampled."""
    if dimension < 1 or size < 0:
        raise ValueError("need dimension >= 1 and size >= 0")
    rng = Random(seed)
    span = 4 * max(size, 1)
    seen: set[tuple[int, ...]] = set()
    attempts = 0
    while len(seen) < size:
        attempts += 1
        if attempts > budget:
            raise SamplingBudgetError(
                f"could not draw {size} distinct points in {budget} attempts"
            )
        seen.add(tuple(rng.randint(0, span) for _ in range(dimension)))
    return Configuration(dimension, tuple(tuple(map(Fraction, p)) for p in seen))


def _minimum_gap(points: tuple[Point, ...], dimension: int) -> Fraction:
    """Smallest positive coordinate difference, 1 when none exists."""
    best: Fraction | None = None
    for c in range(dimension):
        values = sorted({p[c] for p in points})
        for lo, hi in zip(values, values[1:]):
            gap = hi - lo
            if best is None or gap < best:
                best = gap
    return best if best is not None else Fraction(1)


def random_exit_path(
    source: Configuration, seed: int, budget: int = 200
) -> ExitPath:
    """A certified path out of ``source``: split, keep, or drop each point.

    Every target point stays within a box of radius gap/4 around its
    origin, where gap is the smallest positive coordinate difference in
    the source; boxes of distinct origins therefore never meet at any
    projection level, and strands sharing an origin only touch at u = 0.
    The construction retries until the validator agrees.
    """
    rng = Random(seed)
    if source.size == 0:
        return build_exit_path(source, Configuration(source.dimension, ()), ())
    gap = _minimum_gap(source.points, source.dimension)
    step = gap / 16  # offsets are multiples of this, at most 3 per axis
    for _ in range(budget):
        points: list[Point] = []
        origins: list[int] = []
        for s_idx, base_point in enumerate(source.points):
            multiplicity = rng.choices((0, 1, 2, 3), weights=(1, 6, 3, 1))[0]
            offsets: set[tuple[int, ...]] = set()
            while len(offsets) < multiplicity:
                offsets.add(
                    tuple(rng.randint(-3, 3) for _ in range(source.dimension))
                )
            for off in offsets:
                points.append(
                    tuple(c + step * o for c, o in zip(base_point, off))
                )
                origins.append(s_idx)
        if len(set(points)) != len(points):
            continue  # cannot happen under the box bound; kept as a guard
        shift = tuple(
            Fraction(rng.randint(-2, 2)) for _ in range(source.dimension)
        )
        shifted = [tuple(c + s for c, s in zip(p, shift)) for p in points]
        order = sorted(range(len(shifted)), key=lambda i: shifted[i])
        target = Configuration(source.dimension, tuple(shifted[i] for i in order))
        mapping = tuple(origins[i] for i in order)
        path = build_exit_path(source, target, mapping)
        if path.verdict is not None and path.verdict.valid:
            return path
    raise SamplingBudgetError(
        f"no valid exit path from {source} within {budget} attempts"
    )


# ---------------------------------------------------------------------------
# file formats


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, str)):
        return Fraction(text)
    raise ValueError(f"rationals must be integers or 'p/q' strings, got {text!r}")


def configuration_from_json(doc, dimension: int | None = None) -> Configuration:
    """A JSON array of points, each an array of rational strings."""
    points = [tuple(parse_rational(c) for c in row) for row in doc]
    if dimension is None:
        if not points:
            raise ValueError(
                "an empty point list needs an explicit dimension"
            )
        dimension = len(points[0])
    return Configuration(dimension, tuple(points))


def configuration_to_json(cfg: Configuration) -> list[list[str]]:
    return [[str(c) for c in p] for p in cfg.points]


def exit_path_from_json(doc: dict) -> ExitPath:
    """Schema: dimension, source, target (point arrays), map.

    ``map`` pairs target file positions with source file positions; both
    sides are re-indexed into canonical sorted order on load.
    """
    dimension = int(doc["dimension"])
    src_raw = [tuple(parse_rational(c) for c in row) for row in doc["source"]]
    tgt_raw = [tuple(parse_rational(c) for c in row) for row in doc["target"]]
    raw_map = [int(v) for v in doc["map"]]
    if len(raw_map) != len(tgt_raw):
        raise ValueError("map must assign every target point an origin")
    for v in raw_map:
        if not (0 <= v < len(src_raw)):
            raise ValueError(f"map index {v} out of range")
    src_order = sorted(range(len(src_raw)), key=lambda i: src_raw[i])
    tgt_order = sorted(range(len(tgt_raw)), key=lambda i: tgt_raw[i])
    src_rank = {old: new for new, old in enumerate(src_order)}
    mapping = tuple(src_rank[raw_map[old]] for old in tgt_order)
    source = Configuration(dimension, tuple(src_raw))
    target = Configuration(dimension, tuple(tgt_raw))
    return build_exit_path(source, target, mapping)


def exit_path_to_json(path: ExitPath) -> dict:
    return {
        "dimension": path.dimension,
        "source": configuration_to_json(path.source),
        "target": configuration_to_json(path.target),
        "map": list(path.mapping),
    }


def load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def check_morphism_against_path(path: ExitPath) -> bool:
    """The induced morphism's leaf map must be the point assignment."""
    m = morphism_of_exit_path(path)
    row = leaf_row(m)
    return all(row[t] == path.mapping[t] + 1 for t in range(path.target.size))
