"""Tests for rational configurations, exit paths, and the induced functor."""

from __future__ import annotations

from fractions import Fraction as Fr

import pytest

from thetaran.config import (
    Configuration,
    ExitPath,
    InvalidExitPathError,
    SamplingBudgetError,
    build_exit_path,
    check_morphism_against_path,
    compose_point_maps,
    configuration,
    configuration_from_json,
    configuration_to_json,
    exit_path_from_json,
    exit_path_to_json,
    induced_morphism,
    morphism_of_exit_path,
    path_flags,
    random_configuration,
    random_exit_path,
    realize_tree,
    rescale_configuration,
    rescale_exit_path,
    tree_of_configuration,
    validate_exit_path,
)
from thetaran.theta import (
    classify_morphism,
    compose_theta,
    decorated_trees,
    empty_tree,
    identity_theta,
    leaf_row,
    parse_tree,
    prune,
)


class TestConfiguration:
    def test_canonical_order_and_coercion(self):
        cfg = configuration(2, [["3", "1/2"], [1, 4], [Fr(1), Fr(2)]])
        assert cfg.points == (
            (Fr(1), Fr(2)),
            (Fr(1), Fr(4)),
            (Fr(3), Fr(1, 2)),
        )
        assert cfg.size == 3

    def test_rejects_coincident_and_malformed(self):
        with pytest.raises(ValueError):
            configuration(2, [[1, 2], [1, 2]])
        with pytest.raises(ValueError):
            configuration(2, [[1, 2, 3]])
        with pytest.raises(ValueError):
            configuration(0, [])
        with pytest.raises(TypeError):
            configuration(1, [[1.5]])  # floats never enter verdicts

    def test_rescale(self):
        cfg = configuration(1, [[1], [2]])
        assert rescale_configuration(cfg, "1/2").points == ((Fr(1, 2),), (Fr(1),))
        with pytest.raises(ValueError):
            rescale_configuration(cfg, 0)


class TestTreeOfConfiguration:
    def test_frozen_shared_first_coordinate(self):
        cfg = configuration(2, [[2, 1], [2, "5/2"]])
        assert tree_of_configuration(cfg) == parse_tree("[1]([2])")

    def test_frozen_distinct_first_coordinates(self):
        cfg = configuration(2, [[2, 1], ["23/2", "5/2"]])
        assert tree_of_configuration(cfg) == parse_tree("[2]([1],[1])")

    def test_empty(self):
        assert tree_of_configuration(Configuration(2, ())) == empty_tree(2)

    def test_height_three(self):
        cfg = configuration(3, [[0, 0, 0], [0, 0, 1], [0, 1, 0], [2, 0, 0]])
        assert tree_of_configuration(cfg) == parse_tree(
            "[2]([2]([2],[1]),[1]([1]))"
        )


class TestRealizeTree:
    def test_frozen_examples(self):
        assert realize_tree(parse_tree("[2]([1],[1])")).points == (
            (Fr(1), Fr(1)),
            (Fr(2), Fr(1)),
        )
        assert realize_tree(empty_tree(2)).points == ()
        # unhealthy trees realize their pruning: both leaves share the
        # first coordinate of the surviving branch
        cfg = realize_tree(parse_tree("[2]([0],[2])"))
        assert tree_of_configuration(cfg) == parse_tree("[1]([2])")

    def test_roundtrip_is_pruning(self):
        for t in decorated_trees(3, 4, 1):
            assert tree_of_configuration(realize_tree(t)) == prune(t).pruned

    def test_roundtrip_identity_on_healthy(self):
        for text in ["[2]([1],[1])", "[1]([3])", "[2]([1]([2]),[2]([1],[1]))"]:
            t = parse_tree(text)
            assert tree_of_configuration(realize_tree(t)) == t


class TestValidation:
    def test_frozen_split_is_valid(self):
        s = configuration(1, [[0]])
        t = configuration(1, [[-1], [1]])
        verdict = validate_exit_path(s, t, (0, 0))
        assert verdict.valid
        assert all(lv.ok for lv in verdict.levels)

    def test_frozen_swap_collides_halfway(self):
        s = configuration(1, [[0], [1]])
        verdict = validate_exit_path(s, s, (1, 0))
        assert not verdict.valid
        check = verdict.levels[0]
        assert not check.separation_ok
        assert check.collision == (0, 1, Fr(1, 2))

    def test_identity_is_valid(self):
        cfg = configuration(2, [[0, 0], [1, 3], [2, "1/3"]])
        assert validate_exit_path(cfg, cfg, (0, 1, 2)).valid

    def test_incompatible_merge(self):
        # two target points share a first coordinate but come from
        # distinct first coordinates: level 1 rejects the merge
        s = configuration(2, [[0, 0], [4, 0]])
        t = configuration(2, [[1, 0], [1, 1]])
        verdict = validate_exit_path(s, t, (0, 1))
        assert not verdict.valid
        level_one = verdict.levels[0]
        assert not level_one.compatibility_ok
        assert level_one.incompatible == (0, 1)

    def test_level_one_crossing_caught(self):
        # strands cross in the first coordinate while staying apart in
        # the plane: level 2 passes, level 1 does not
        s = configuration(2, [[0, 0], [1, 5]])
        t = configuration(2, [[0, 5], [1, 0]])
        verdict = validate_exit_path(s, t, (1, 0))
        assert not verdict.valid
        assert not verdict.levels[0].separation_ok
        assert verdict.levels[1].separation_ok

    def test_endpoint_touch_counts(self):
        # coincident targets are rejected before validation starts
        with pytest.raises(ValueError):
            configuration(1, [[1], ["1/1"]])
        # crossing strands meet strictly inside (0, 1]
        s = configuration(1, [[0], [2]])
        t = configuration(1, [[1], [3]])
        verdict = validate_exit_path(s, t, (1, 0))
        assert not verdict.valid

    def test_mapping_shape_errors(self):
        s = configuration(1, [[0]])
        t = configuration(2, [[0, 0]])
        with pytest.raises(ValueError):
            ExitPath(s, t, (0,))
        with pytest.raises(ValueError):
            ExitPath(s, s, ())
        with pytest.raises(ValueError):
            ExitPath(s, s, (3,))


class TestInducedMorphism:
    def test_frozen_height_one_base(self):
        s = configuration(1, [[0], [1], [2]])
        t = configuration(1, [["-1/2"], ["1/2"], ["3/2"]])
        m = morphism_of_exit_path(build_exit_path(s, t, (0, 0, 1)))
        assert m.base.values == (0, 2, 3, 3)

    def test_identity_path_gives_identity(self):
        cfg = configuration(2, [[0, 0], [1, 3], [2, "1/3"]])
        path = build_exit_path(cfg, cfg, (0, 1, 2))
        m = morphism_of_exit_path(path)
        assert m == identity_theta(tree_of_configuration(cfg))

    def test_frozen_height_two_collapse(self):
        s = configuration(2, [[1, 1], [2, 1]])
        t = configuration(2, [[1, 1], [1, 2], [2, 1]])
        m = morphism_of_exit_path(build_exit_path(s, t, (0, 0, 1)))
        assert m.base.values == (0, 1, 2)
        assert m.components[0].base.values == (0, 2)
        assert m.components[1].base.values == (0, 1)

    def test_verdict_gate(self):
        s = configuration(1, [[0], [1]])
        bare = ExitPath(s, s, (0, 1))  # no certificate attached
        with pytest.raises(InvalidExitPathError):
            morphism_of_exit_path(bare)
        swapped = build_exit_path(s, s, (1, 0))
        with pytest.raises(InvalidExitPathError):
            morphism_of_exit_path(swapped)

    def test_induced_rejects_incoherent_data(self):
        s = configuration(2, [[1, 1], [2, 1]])
        t = configuration(2, [[1, 1], [1, 2]])
        with pytest.raises(ValueError):
            induced_morphism(s, t, (0, 1))
        line = configuration(1, [[0], [1]])
        with pytest.raises(ValueError):
            induced_morphism(line, line, (1, 0))

    def test_leaf_map_is_point_assignment(self):
        for seed in range(20):
            cfg = random_configuration(2, 3, seed)
            path = random_exit_path(cfg, seed + 50)
            assert check_morphism_against_path(path)
            m = morphism_of_exit_path(path)
            assert leaf_row(m) == tuple(v + 1 for v in path.mapping)

    def test_flags_match_classification(self):
        for seed in range(20):
            cfg = random_configuration(3, 3, seed)
            path = random_exit_path(cfg, seed + 90)
            flags = classify_morphism(morphism_of_exit_path(path))
            bijective, surjective = path_flags(path)
            assert flags.active
            assert flags.in_w == bijective == path.is_point_bijection
            assert flags.exit == surjective

    def test_functoriality_sample(self):
        for seed in range(10):
            for n in (1, 2, 3):
                start = random_configuration(n, 3, seed * 7 + n)
                first = random_exit_path(start, seed * 11 + n)
                second = random_exit_path(first.target, seed * 13 + n)
                composite = compose_point_maps(second.mapping, first.mapping)
                direct = induced_morphism(start, second.target, composite)
                staged = compose_theta(
                    morphism_of_exit_path(second), morphism_of_exit_path(first)
                )
                assert direct == staged

    def test_compose_point_maps(self):
        assert compose_point_maps((1, 0, 1), (2, 5)) == (5, 2, 5)
        assert compose_point_maps((), (0, 1)) == ()


class TestRescaleInvariance:
    def test_verdicts_survive_rescaling(self):
        factors = (Fr(3, 7), Fr(-2, 3), 5, Fr(-1), Fr(1, 12))
        checked = 0
        for seed in range(25):
            cfg = random_configuration(2, 3, seed)
            path = random_exit_path(cfg, seed + 500)
            for factor in factors:
                scaled = rescale_exit_path(path, factor)
                assert scaled.verdict.valid == path.verdict.valid
                checked += 1
        assert checked >= 100

    def test_positive_rescale_keeps_morphism(self):
        cfg = configuration(2, [[0, 0], [1, 2]])
        path = random_exit_path(cfg, 3)
        scaled = rescale_exit_path(path, Fr(5, 3))
        assert morphism_of_exit_path(scaled) == morphism_of_exit_path(path)


class TestGenerators:
    def test_deterministic(self):
        a = random_configuration(2, 4, 99)
        b = random_configuration(2, 4, 99)
        assert a == b
        pa = random_exit_path(a, 7)
        pb = random_exit_path(b, 7)
        assert pa.target == pb.target and pa.mapping == pb.mapping

    def test_frozen_shapes(self):
        assert random_configuration(2, 0, 1).size == 0
        cfg = random_configuration(2, 3, 7)
        assert cfg.size == 3
        assert len(set(cfg.points)) == 3
        empty = Configuration(2, ())
        path = random_exit_path(empty, 4)
        assert path.target.size == 0 and path.mapping == ()
        assert path.verdict.valid

    def test_sampled_paths_are_valid(self):
        for seed in range(15):
            cfg = random_configuration(2, 4, seed)
            path = random_exit_path(cfg, seed)
            assert path.verdict is not None and path.verdict.valid

    def test_budget_errors(self):
        with pytest.raises(SamplingBudgetError):
            random_configuration(1, 2, 0, budget=1)
        cfg = random_configuration(2, 3, 1)
        with pytest.raises(SamplingBudgetError):
            random_exit_path(cfg, 5, budget=0)
        with pytest.raises(ValueError):
            random_configuration(0, 1, 0)


class TestFileFormats:
    def test_configuration_roundtrip(self):
        cfg = configuration(2, [[1, "1/2"], ["-3/4", 2]])
        doc = configuration_to_json(cfg)
        assert doc == [["-3/4", "2"], ["1", "1/2"]]
        assert configuration_from_json(doc) == cfg
        assert configuration_from_json([], dimension=3) == Configuration(3, ())
        with pytest.raises(ValueError):
            configuration_from_json([])
        with pytest.raises(ValueError):
            configuration_from_json([[1.5]])

    def test_exit_path_roundtrip(self):
        cfg = random_configuration(2, 3, 21)
        path = random_exit_path(cfg, 22)
        doc = exit_path_to_json(path)
        loaded = exit_path_from_json(doc)
        assert loaded.source == path.source
        assert loaded.target == path.target
        assert loaded.mapping == path.mapping
        assert loaded.verdict.valid == path.verdict.valid

    def test_exit_path_file_order_reindexed(self):
        # file lists points out of order; indices refer to file positions
        doc = {
            "dimension": 1,
            "source": [["1"], ["0"]],
            "target": [["3/2"], ["-1"]],
            "map": [0, 1],
        }
        path = exit_path_from_json(doc)
        assert path.source.points == ((Fr(0),), (Fr(1),))
        assert path.mapping == (0, 1)
        assert path.verdict.valid

    def test_exit_path_schema_errors(self):
        base = {
            "dimension": 1,
            "source": [["0"]],
            "target": [["1"]],
            "map": [0, 0],
        }
        with pytest.raises(ValueError):
            exit_path_from_json(base)
        base["map"] = [2]
        with pytest.raises(ValueError):
            exit_path_from_json(base)
