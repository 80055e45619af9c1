"""Key joint / key line selection.

Joints are addressed globally: main subject 0..24, auxiliary 25..49.  Every
plan is an integer index array in canonical order (pairs ``j < k``
lexicographic, main before auxiliary; lines ``(a, b)`` with ``a < b``, sorted;
joint-line rows grouped by line, then by joint).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .skeleton import BONES, NUM_JOINTS

SUBJECTS = ("main", "auxiliary")
FAMILIES = ("JJd", "JJv", "JJo", "JLd", "LLa")
SCALAR_FAMILIES = ("JJd", "JLd", "LLa")
VECTOR_FAMILIES = ("JJv", "JJo")
STRATEGIES = ("JS1", "JS2", "JS3", "LS1", "LS2", "FULL")

N_TOTAL = 2 * NUM_JOINTS

# 0-based NTU indices. JS2 starts at the middle of the spine, JS3 at the base.
DEFAULT_JS2 = (1, 3, 4, 6, 8, 10, 12, 14, 16, 18, 21, 23)
DEFAULT_JS3 = (0, 3, 5, 7, 9, 11, 13, 15, 17, 19, 20)
# 24 bones, the 10 lines between extremities (head, hands, feet) and the
# 5 lines from the base of the spine to each extremity.
_EXTREMITIES = (3, 7, 11, 15, 19)
DEFAULT_LS1 = tuple(sorted(
    [tuple(sorted(b)) for b in BONES]
    + [tuple(sorted(p)) for p in combinations(_EXTREMITIES, 2)]
    + [(0, e) for e in _EXTREMITIES]
))
DEFAULT_ADJACENCY = tuple(tuple(sorted(b)) for b in BONES)
LS2_NEIGHBOR_STEPS = 2


class SelectionConfigError(ValueError):
    pass


@dataclass(frozen=True)
class JointRef:
    subject: str
    index: int

    def __post_init__(self):
        if self.subject not in SUBJECTS or not 0 <= self.index < NUM_JOINTS:
            raise ValueError(f"bad joint reference {self.subject}/{self.index}")

    @property
    def global_index(self) -> int:
        return self.index + NUM_JOINTS * SUBJECTS.index(self.subject)

    @classmethod
    def from_global(cls, g: int) -> "JointRef":
        return cls(SUBJECTS[g // NUM_JOINTS], g % NUM_JOINTS)


@dataclass(frozen=True)
class Line:
    a: JointRef
    b: JointRef

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("a line needs two distinct joints")


@dataclass(frozen=True)
class SelectionTables:
    js2: Tuple[int, ...] = DEFAULT_JS2
    js3: Tuple[int, ...] = DEFAULT_JS3
    ls1: Tuple[Tuple[int, int], ...] = DEFAULT_LS1
    adjacency: Tuple[Tuple[int, int], ...] = DEFAULT_ADJACENCY

    def to_dict(self) -> dict:
        return {"js2": list(self.js2), "js3": list(self.js3),
                "ls1": [list(x) for x in self.ls1], "adjacency": [list(x) for x in self.adjacency]}

    @classmethod
    def from_dict(cls, d: dict) -> "SelectionTables":
        default = cls()
        return cls(
            js2=tuple(int(x) for x in d.get("js2", default.js2)),
            js3=tuple(int(x) for x in d.get("js3", default.js3)),
            ls1=tuple(tuple(int(v) for v in x) for x in d.get("ls1", default.ls1)),
            adjacency=tuple(tuple(int(v) for v in x) for x in d.get("adjacency", default.adjacency)),
        )


@dataclass
class SelectionPlan:
    """``index`` rows are joint pairs ``(j, k)`` for JJ families, triples
    ``(j, k, m)`` (joint j, line k-m) for JLd, quads ``(j, k, m, n)`` (line j-k,
    line m-n) for LLa."""
    family: str
    strategy: str
    index: np.ndarray
    subject: str = "both"   # "main"/"auxiliary" for single-subject plans

    def __len__(self):
        return len(self.index)

    @property
    def dimension(self) -> int:
        return len(self.index) * (3 if self.family in VECTOR_FAMILIES else 1)

    @property
    def label(self) -> str:
        return f"{self.family}-{self.strategy}"

    def row_subjects(self) -> np.ndarray:
        aux = self.index >= NUM_JOINTS
        tags = np.full(len(self.index), "cross", dtype=object)
        tags[~aux.any(axis=1)] = "main"
        tags[aux.all(axis=1)] = "auxiliary"
        return tags

    def for_subject(self, subject: str) -> "SelectionPlan":
        """Same rows re-targeted at ``subject``; only for single-subject plans."""
        if self.subject not in SUBJECTS:
            raise ValueError(f"{self.label} spans both subjects and cannot be re-targeted")
        shift = NUM_JOINTS * (SUBJECTS.index(subject) - SUBJECTS.index(self.subject))
        return SelectionPlan(self.family, self.strategy, self.index + shift, subject)

    def entries(self) -> List[tuple]:
        """Rows as :class:`JointRef` / :class:`Line` tuples."""
        ref = JointRef.from_global
        if self.family == "JLd":
            return [(ref(j), Line(ref(k), ref(m))) for j, k, m in self.index.tolist()]
        if self.family == "LLa":
            return [(Line(ref(j), ref(k)), Line(ref(m), ref(n))) for j, k, m, n in self.index.tolist()]
        return [(ref(j), ref(k)) for j, k in self.index.tolist()]


def _pairs(joints: Sequence[int]) -> np.ndarray:
    joints = sorted(joints)
    if len(joints) < 2:
        return np.empty((0, 2), dtype=np.int64)
    i, k = np.triu_indices(len(joints), 1)
    arr = np.asarray(joints, dtype=np.int64)
    return np.stack([arr[i], arr[k]], axis=1)


def _both(joints: Sequence[int]) -> List[int]:
    return list(joints) + [j + NUM_JOINTS for j in joints]


def _check_joint_list(name: str, joints: Sequence[int], size: int):
    bad = [j for j in joints if not 0 <= j < NUM_JOINTS]
    if bad:
        raise SelectionConfigError(f"{name} joint indices out of range 0..{NUM_JOINTS - 1}: {bad}")
    if len(set(joints)) != len(joints):
        raise SelectionConfigError(f"{name} joint list has duplicates: {list(joints)}")
    if len(joints) != size:
        n = 2 * len(joints)
        raise SelectionConfigError(
            f"{name} joint list has {len(joints)} joints per subject, giving C({n},2)={comb(n, 2)} pairs; "
            f"expected {comb(2 * size, 2)}")


def _line_table(lines: Sequence[Tuple[int, int]]) -> np.ndarray:
    out = set()
    for a, b in lines:
        if not (0 <= a < NUM_JOINTS and 0 <= b < NUM_JOINTS) or a == b:
            raise SelectionConfigError(f"invalid line ({a}, {b})")
        out.add((min(a, b), max(a, b)))
    return np.array(sorted(out), dtype=np.int64).reshape(-1, 2)


def _joint_line_rows(lines: np.ndarray, candidates) -> np.ndarray:
    """For each line, one row per candidate joint (candidates(line) -> iterable)."""
    rows = [(j, k, m) for k, m in lines.tolist() for j in sorted(candidates(k, m))]
    return np.array(rows, dtype=np.int64).reshape(-1, 3)


def _line_pairs(lines: np.ndarray) -> np.ndarray:
    i, k = np.triu_indices(len(lines), 1)
    return np.concatenate([lines[i], lines[k]], axis=1)


def graph_distances(adjacency: Sequence[Tuple[int, int]], n: int = NUM_JOINTS) -> np.ndarray:
    """All-pairs hop counts on the skeleton graph (-1 if unreachable)."""
    nbrs: Dict[int, List[int]] = {i: [] for i in range(n)}
    for a, b in adjacency:
        nbrs[a].append(b)
        nbrs[b].append(a)
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        dist[src, src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if dist[src, v] < 0:
                    dist[src, v] = dist[src, u] + 1
                    queue.append(v)
    return dist


def expected_dimension(family: str, strategy: str) -> int:
    """Closed-form row counts; LS2 has none (it depends on the adjacency table)."""
    counts = {
        "JS1": 2 * comb(NUM_JOINTS, 2),
        "JS2": comb(24, 2),
        "JS3": comb(22, 2),
    }
    if strategy in counts:
        return counts[strategy]
    if strategy == "LS1":
        return {"JLd": 39 * (NUM_JOINTS - 2), "LLa": comb(39, 2)}[family]
    if strategy == "FULL":
        lines = comb(N_TOTAL, 2)
        return {"JLd": lines * (N_TOTAL - 2), "LLa": comb(lines, 2)}.get(family, lines)
    raise KeyError(f"no closed-form dimension for {family}-{strategy}")


def build_selection_plan(family: str, strategy: str, tables: SelectionTables = SelectionTables()) -> SelectionPlan:
    if family not in FAMILIES:
        raise ValueError(f"unknown feature family {family!r}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    joint_family = family in ("JJd", "JJv", "JJo")
    if strategy.startswith("JS") and not joint_family:
        raise ValueError(f"{strategy} applies to joint-joint features, not {family}")
    if strategy.startswith("LS") and joint_family:
        raise ValueError(f"{strategy} applies to JLd/LLa, not {family}")
    if strategy == "LS2" and family != "JLd":
        raise ValueError("LS2 is defined for JLd only")

    subject = "both"
    if strategy == "JS1":
        index = np.concatenate([_pairs(range(NUM_JOINTS)), _pairs(range(NUM_JOINTS, N_TOTAL))])
    elif strategy in ("JS2", "JS3"):
        joints = tables.js2 if strategy == "JS2" else tables.js3
        _check_joint_list(strategy, joints, 12 if strategy == "JS2" else 11)
        index = _pairs(_both(joints))
    elif strategy == "LS1":
        lines = _line_table(tables.ls1)
        if len(lines) != 39:
            raise SelectionConfigError(
                f"LS1 line table has {len(lines)} distinct lines, giving {len(lines) * (NUM_JOINTS - 2)} JLd and "
                f"{comb(len(lines), 2)} LLa rows; expected {expected_dimension(family, 'LS1')} {family} rows")
        subject = "main"
        if family == "JLd":
            index = _joint_line_rows(lines, lambda k, m: set(range(NUM_JOINTS)) - {k, m})
        else:
            index = _line_pairs(lines)
    elif strategy == "LS2":
        _check_joint_list("JS3", tables.js3, 11)
        dist = graph_distances(tables.adjacency)
        rows = []
        for offset in (0, NUM_JOINTS):
            lines = _pairs(tables.js3)

            def near(k, m):
                hop = np.minimum(np.where(dist[k] < 0, 99, dist[k]), np.where(dist[m] < 0, 99, dist[m]))
                return set(np.flatnonzero(hop <= LS2_NEIGHBOR_STEPS).tolist()) - {k, m}

            rows.append(_joint_line_rows(lines, near) + offset)
        index = np.concatenate(rows)
    else:  # FULL
        lines = _pairs(range(N_TOTAL))
        if family == "JLd":
            j = np.arange(N_TOTAL)
            rows = [np.stack([j[(j != k) & (j != m)], np.full(N_TOTAL - 2, k), np.full(N_TOTAL - 2, m)], axis=1)
                    for k, m in lines.tolist()]
            index = np.concatenate(rows)
        elif family == "LLa":
            index = _line_pairs(lines)
        else:
            index = lines

    plan = SelectionPlan(family, strategy, np.ascontiguousarray(index, dtype=np.int64), subject)
    if strategy != "LS2":
        want = expected_dimension(family, strategy)
        if len(plan) != want:
            raise SelectionConfigError(f"{plan.label} plan has {len(plan)} rows; expected {want}")
    return plan
