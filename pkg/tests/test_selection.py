from itertools import combinations
from math import comb

import numpy as np
import pytest

from skeltex.selection import (DEFAULT_JS2, DEFAULT_JS3, DEFAULT_LS1, JointRef, Line, SelectionConfigError,
                               SelectionTables, build_selection_plan, graph_distances)
from skeltex.skeleton import BONES


@pytest.mark.parametrize("family, strategy, expected", [
    ("JJd", "JS1", 600), ("JJv", "JS1", 600), ("JJo", "JS1", 600),
    ("JJd", "JS2", 276), ("JJd", "JS3", 231),
    ("JLd", "LS1", 897), ("LLa", "LS1", 741),
    ("JJd", "FULL", 1225), ("JJv", "FULL", 1225), ("JLd", "FULL", 58800),
])
def test_plan_sizes(family, strategy, expected):
    assert len(build_selection_plan(family, strategy)) == expected


def test_vector_dimension_triples():
    assert build_selection_plan("JJv", "FULL").dimension == 3675
    assert build_selection_plan("JJo", "FULL").dimension == 3675


def test_full_lla_matches_enumeration():
    plan = build_selection_plan("LLa", "FULL")
    n_lines = sum(1 for _ in combinations(range(50), 2))
    assert len(plan) == sum(1 for _ in combinations(range(n_lines), 2)) == 749700


def test_js1_is_within_subject_only():
    plan = build_selection_plan("JJd", "JS1")
    assert set(plan.row_subjects()) == {"main", "auxiliary"}
    assert (plan.row_subjects()[:300] == "main").all()


def test_js2_js3_joint_membership():
    for strategy, joints in (("JS2", DEFAULT_JS2), ("JS3", DEFAULT_JS3)):
        plan = build_selection_plan("JJd", strategy)
        used = set(np.unique(plan.index).tolist())
        assert used == set(joints) | {j + 25 for j in joints}
    assert DEFAULT_JS2[0] == 1 and DEFAULT_JS3[0] == 0  # middle / base of the spine


def test_default_tables_are_two_steps_apart():
    dist = graph_distances(BONES)
    for joints in (DEFAULT_JS2, DEFAULT_JS3):
        assert all(dist[a, b] >= 2 for a, b in combinations(joints, 2))


def test_canonical_order():
    plan = build_selection_plan("JJd", "FULL")
    assert plan.index.tolist() == [list(p) for p in combinations(range(50), 2)]
    jld = build_selection_plan("JLd", "LS1")
    lines = jld.index[:, 1:]
    keys = [tuple(r) for r in jld.index[:, [1, 2, 0]].tolist()]
    assert keys == sorted(keys)
    assert (lines[:, 0] < lines[:, 1]).all()


def test_entries_are_unique():
    for family, strategy in [("JJd", "JS2"), ("JLd", "LS1"), ("LLa", "LS1"), ("JLd", "LS2")]:
        idx = build_selection_plan(family, strategy).index
        assert len({tuple(r) for r in idx.tolist()}) == len(idx)


def test_ls1_jld_uses_the_other_23_joints():
    plan = build_selection_plan("JLd", "LS1")
    for k, m in DEFAULT_LS1:
        rows = plan.index[(plan.index[:, 1] == k) & (plan.index[:, 2] == m)]
        assert sorted(rows[:, 0].tolist()) == sorted(set(range(25)) - {k, m})


def test_ls2_candidates_within_two_steps():
    plan = build_selection_plan("JLd", "LS2")
    dist = graph_distances(BONES)
    for j, k, m in plan.index.tolist():
        sub = j // 25
        assert k // 25 == sub and m // 25 == sub
        j, k, m = j % 25, k % 25, m % 25
        assert k in DEFAULT_JS3 and m in DEFAULT_JS3
        assert min(dist[j, k], dist[j, m]) <= 2 and j not in (k, m)
    assert len(plan) == len(build_selection_plan("JLd", "LS2"))  # reported size is stable


def test_for_subject():
    plan = build_selection_plan("JLd", "LS1")
    aux = plan.for_subject("auxiliary")
    assert np.array_equal(aux.index, plan.index + 25)
    assert set(aux.row_subjects()) == {"auxiliary"}
    with pytest.raises(ValueError):
        build_selection_plan("JJd", "JS2").for_subject("main")


def test_entries_api():
    entries = build_selection_plan("LLa", "LS1").entries()
    first = entries[0]
    assert isinstance(first[0], Line) and first[0].a == JointRef("main", 0)
    assert JointRef.from_global(27) == JointRef("auxiliary", 2)


def test_wrong_js3_size_states_both_counts():
    tables = SelectionTables(js3=DEFAULT_JS3[:10])
    with pytest.raises(SelectionConfigError, match=r"C\(20,2\)=190.*expected 231"):
        build_selection_plan("JJd", "JS3", tables)


def test_wrong_ls1_size():
    tables = SelectionTables(ls1=DEFAULT_LS1[:38])
    with pytest.raises(SelectionConfigError, match="expected 897"):
        build_selection_plan("JLd", "LS1", tables)


def test_custom_membership_is_allowed():
    tables = SelectionTables(js2=tuple(range(12)))
    assert len(build_selection_plan("JJd", "JS2", tables)) == comb(24, 2)


@pytest.mark.parametrize("family, strategy", [("JJd", "LS1"), ("JLd", "JS1"), ("LLa", "LS2"), ("XYZ", "JS1")])
def test_incompatible_strategy(family, strategy):
    with pytest.raises(ValueError):
        build_selection_plan(family, strategy)
