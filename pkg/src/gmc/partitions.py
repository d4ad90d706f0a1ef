"""Exact partition algebra: partitions of {1..n}, meeting graphs, orthogonality,
duals, closure, connective validation, and the cut-merge simulation.

Elements are 1-based integers.  A polarized partition additionally marks a
subset of elements as *checked*; checked elements are printed with a minus
sign (``[[1,2,-5],[3,4,-6]]``).  Orthogonality of two partitions means their
meeting graph is a tree (connected and acyclic), which coincides with success
of the atomic cut-merge replay implemented by :func:`simulate_cut_merge`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

DEFAULT_ARITY_CAP = 9
DEFAULT_POLARIZED_ARITY_CAP = 6


class ArityMismatchError(ValueError):
    """Two partitions of different arity were combined."""


class CapExceededError(ValueError):
    """An exhaustive enumeration was requested beyond the configured cap."""


def _freeze_classes(classes: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(c)) for c in classes))


@dataclass(frozen=True)
class Partition:
    """A partition of {1..arity} into disjoint nonempty classes.

    ``checked`` is the (possibly empty) set of checked elements; a plain
    classical partition has ``checked == ()``.  Instances are canonical:
    classes are sorted tuples ordered by their least element, so equality and
    hashing are by value.
    """

    arity: int
    classes: tuple[tuple[int, ...], ...]
    checked: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for cls in self.classes:
            if not cls:
                raise ValueError("empty class")
            if seen.intersection(cls):
                raise ValueError(f"classes overlap at {sorted(seen.intersection(cls))}")
            seen.update(cls)
        if seen != set(range(1, self.arity + 1)):
            raise ValueError(f"classes do not cover 1..{self.arity}: {sorted(seen)}")
        if not set(self.checked) <= seen:
            raise ValueError("checked elements outside 1..arity")

    @classmethod
    def of(
        cls,
        classes: Iterable[Iterable[int]],
        checked: Iterable[int] = (),
        arity: int | None = None,
    ) -> "Partition":
        frozen = _freeze_classes(classes)
        elements = [e for c in frozen for e in c]
        n = arity if arity is not None else (max(elements) if elements else 0)
        return cls(n, frozen, tuple(sorted(set(checked))))

    @classmethod
    def from_signed(
        cls, classes: Iterable[Iterable[int]], arity: int | None = None
    ) -> "Partition":
        """Build from negative-integer shorthand: ``-i`` marks element i checked."""
        plain = [[abs(e) for e in c] for c in classes]
        checked = [abs(e) for c in classes for e in c if e < 0]
        return cls.of(plain, checked, arity)

    def signed(self) -> list[list[int]]:
        marked = set(self.checked)
        return [[-e if e in marked else e for e in c] for c in self.classes]

    def class_of(self, element: int) -> tuple[int, ...]:
        for c in self.classes:
            if element in c:
                return c
        raise KeyError(element)

    def rgs(self) -> tuple[int, ...]:
        """Restricted growth string: class index of each element, classes
        numbered by first appearance.  Defines the canonical partition order."""
        index = {}
        for i, c in enumerate(self.classes):
            for e in c:
                index[e] = i
        return tuple(index[e] for e in range(1, self.arity + 1))

    def sort_key(self) -> tuple:
        return (self.rgs(), self.checked)

    @property
    def is_intuitionistic(self) -> bool:
        """At most one checked element per class."""
        marked = set(self.checked)
        return all(len(marked.intersection(c)) <= 1 for c in self.classes)

    @property
    def is_strict(self) -> bool:
        """Exactly one checked element per class (right-rule form)."""
        marked = set(self.checked)
        return all(len(marked.intersection(c)) == 1 for c in self.classes)

    def __str__(self) -> str:
        return "[" + ",".join("[" + ",".join(map(str, c)) + "]" for c in self.signed()) + "]"


@dataclass(frozen=True)
class PartitionSet:
    """A finite set of partitions of a common arity, canonically ordered."""

    arity: int
    members: tuple[Partition, ...]

    def __post_init__(self) -> None:
        for p in self.members:
            if p.arity != self.arity:
                raise ArityMismatchError(f"member arity {p.arity} != {self.arity}")
        keys = [p.sort_key() for p in self.members]
        if sorted(set(keys)) != keys:
            raise ValueError("members not canonically sorted / contain duplicates")

    @classmethod
    def of(cls, arity: int, members: Iterable[Partition]) -> "PartitionSet":
        uniq = sorted(set(members), key=Partition.sort_key)
        return cls(arity, tuple(uniq))

    def __iter__(self) -> Iterator[Partition]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, p: Partition) -> bool:
        return p in set(self.members)

    def issubset(self, other: "PartitionSet") -> bool:
        return set(self.members) <= set(other.members)

    def __str__(self) -> str:
        return " ; ".join(str(p) for p in self.members)


@dataclass(frozen=True)
class MeetingGraph:
    """Bipartite multigraph on the classes of two partitions.

    Edges are (left class index, right class index, witness element) triples;
    parallel edges are kept, they are exactly the two-element cycles.
    """

    left_classes: tuple[tuple[int, ...], ...]
    right_classes: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int, int], ...]

    @property
    def n_vertices(self) -> int:
        return len(self.left_classes) + len(self.right_classes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def is_tree(self) -> bool:
        """Connected and acyclic, checked by union-find over the edge list."""
        n = self.n_vertices
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for li, ri, _ in self.edges:
            a, b = find(li), find(len(self.left_classes) + ri)
            if a == b:
                return False  # cycle
            parent[a] = b
        return self.n_edges == n - 1


def meeting_graph(p: Partition, q: Partition, polarized: bool = False) -> MeetingGraph:
    """Build G(p,q): one edge per shared element; in polarized mode only for
    elements checked in exactly one of p, q."""
    if p.arity != q.arity:
        raise ArityMismatchError(f"arities differ: {p.arity} vs {q.arity}")
    pc, qc = set(p.checked), set(q.checked)
    left_index = {e: i for i, c in enumerate(p.classes) for e in c}
    right_index = {e: i for i, c in enumerate(q.classes) for e in c}
    edges = []
    for e in range(1, p.arity + 1):
        if polarized and not ((e in pc) ^ (e in qc)):
            continue
        edges.append((left_index[e], right_index[e], e))
    return MeetingGraph(p.classes, q.classes, tuple(edges))


def is_orthogonal(p: Partition, q: Partition, polarized: bool = False) -> bool:
    """p is orthogonal to q iff their meeting graph is a tree."""
    return meeting_graph(p, q, polarized).is_tree()


@dataclass(frozen=True)
class CutStep:
    element: int
    left_premise: tuple[int, ...]
    right_premise: tuple[int, ...]
    merged: bool


@dataclass(frozen=True)
class MergeReport:
    """Replay of the main cut-reduction step between two introduction rules."""

    success: bool
    steps: tuple[CutStep, ...]
    sequents_remaining: int
    failure: str | None = None


def simulate_cut_merge(p: Partition, q: Partition, polarized: bool = False) -> MergeReport:
    """Start with one abstract premise sequent per class of p and of q and cut
    on each shared element in turn, merging the two containing sequents.

    Succeeds iff every cut joins two distinct sequents and a single sequent
    remains at the end; success coincides with :func:`is_orthogonal`.
    """
    if p.arity != q.arity:
        raise ArityMismatchError(f"arities differ: {p.arity} vs {q.arity}")
    pc, qc = set(p.checked), set(q.checked)
    # sequent ids: 0..k-1 for p's classes, k.. for q's
    k = len(p.classes)
    owner: dict[tuple[str, int], int] = {}
    contents: dict[int, set[int]] = {}
    for i, c in enumerate(p.classes):
        contents[i] = set(c)
        for e in c:
            owner[("p", e)] = i
    for j, c in enumerate(q.classes):
        contents[k + j] = set(c)
        for e in c:
            owner[("q", e)] = k + j
    parent = list(range(k + len(q.classes)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    steps: list[CutStep] = []
    for e in range(1, p.arity + 1):
        if polarized and not ((e in pc) ^ (e in qc)):
            continue
        a, b = find(owner[("p", e)]), find(owner[("q", e)])
        left, right = tuple(sorted(contents[a])), tuple(sorted(contents[b]))
        if a == b:
            steps.append(CutStep(e, left, right, merged=False))
            return MergeReport(
                success=False,
                steps=tuple(steps),
                sequents_remaining=len({find(x) for x in range(len(parent))}),
                failure=f"cut on element {e} would merge a sequent with itself (cycle)",
            )
        steps.append(CutStep(e, left, right, merged=True))
        parent[a] = b
        contents[b] = contents[a] | contents[b]
        del contents[a]
    remaining = len({find(x) for x in range(len(parent))})
    if remaining != 1:
        return MergeReport(
            success=False,
            steps=tuple(steps),
            sequents_remaining=remaining,
            failure=f"{remaining} sequents remain after all cuts (graph disconnected)",
        )
    return MergeReport(success=True, steps=tuple(steps), sequents_remaining=1)


def _class_structures(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All set partitions of {1..n} in lexicographic restricted-growth order."""
    classes: list[list[int]] = []

    def rec(i: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if i > n:
            yield tuple(tuple(c) for c in classes)
            return
        for c in classes:
            c.append(i)
            yield from rec(i + 1)
            c.pop()
        classes.append([i])
        yield from rec(i + 1)
        classes.pop()

    return rec(1)


def all_partitions(
    n: int,
    polarized: bool = False,
    intuitionistic: bool = False,
    cap: int | None = None,
) -> Iterator[Partition]:
    """Yield every partition of {1..n} exactly once, in canonical order.

    In polarized mode every checked-subset assignment is emitted as well;
    with ``intuitionistic`` set, only assignments with at most one checked
    element per class.
    """
    if n < 1:
        raise ValueError("arity must be positive")
    limit = cap if cap is not None else (
        DEFAULT_POLARIZED_ARITY_CAP if polarized else DEFAULT_ARITY_CAP
    )
    if n > limit:
        raise CapExceededError(f"arity {n} exceeds enumeration cap {limit}")
    for classes in _class_structures(n):
        if not polarized:
            yield Partition(n, classes)
            continue
        if intuitionistic:
            for choice in itertools.product(*[(None, *c) for c in classes]):
                checked = tuple(sorted(e for e in choice if e is not None))
                yield Partition(n, classes, checked)
        else:
            elements = range(1, n + 1)
            for r in range(n + 1):
                for subset in itertools.combinations(elements, r):
                    yield Partition(n, classes, subset)


def dual(
    ps: PartitionSet,
    polarized: bool = False,
    intuitionistic: bool | None = None,
    cap: int | None = None,
) -> PartitionSet:
    """P^orth: all partitions orthogonal to every member of P.

    Computed by exhaustive enumeration; in polarized mode the candidates
    range over intuitionistic polarized partitions (the quantification used
    to pair left and right rule sets), unless ``intuitionistic=False``.
    """
    if intuitionistic is None:
        intuitionistic = polarized
    members = [
        q
        for q in all_partitions(ps.arity, polarized, intuitionistic, cap)
        if all(is_orthogonal(q, p, polarized) for p in ps)
    ]
    return PartitionSet.of(ps.arity, members)


def closure(
    ps: PartitionSet,
    polarized: bool = False,
    intuitionistic: bool | None = None,
    cap: int | None = None,
) -> PartitionSet:
    """dual(dual(P)); the least closed set containing P."""
    return dual(dual(ps, polarized, intuitionistic, cap), polarized, intuitionistic, cap)


@dataclass(frozen=True)
class ConnectivePair:
    """A generalized connective: arity plus two mutually dual partition sets.

    ``left`` describes the introduction rules used for decomposability
    questions in the classical systems; for the polarized (two-sided) case
    ``left``/``right`` hold the left-rule and right-rule sets respectively.
    """

    arity: int
    left: PartitionSet
    right: PartitionSet
    name: str | None = None
    polarized: bool = False

    def __post_init__(self) -> None:
        if self.left.arity != self.arity or self.right.arity != self.arity:
            raise ArityMismatchError("partition sets disagree with connective arity")

    def swap(self) -> "ConnectivePair":
        return ConnectivePair(
            self.arity,
            self.right,
            self.left,
            name=None if self.name is None else self.name + "*",
            polarized=self.polarized,
        )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_connective(
    c: ConnectivePair, polarized: bool | None = None, cap: int | None = None
) -> ValidationReport:
    """Check mutual duality: dual(left) == right and dual(right) == left.

    Never raises for a well-formed pair; returns a report listing the
    violating partitions on failure.
    """
    pol = c.polarized if polarized is None else polarized
    problems: list[str] = []
    if not c.left.members:
        problems.append("left set empty")
    if not c.right.members:
        problems.append("right set empty")
    if pol:
        for side, ps in (("left", c.left), ("right", c.right)):
            bad = [str(p) for p in ps if not p.is_intuitionistic]
            if bad:
                problems.append(f"{side} members not intuitionistic: {', '.join(bad)}")
    if problems:
        return ValidationReport(False, tuple(problems))
    for src, expect, label in (
        (c.left, c.right, "dual(left) != right"),
        (c.right, c.left, "dual(right) != left"),
    ):
        d = dual(src, pol, cap=cap)
        if d.members != expect.members:
            missing = [str(p) for p in expect if p not in d]
            extra = [str(p) for p in d if p not in expect]
            detail = []
            if missing:
                detail.append("missing " + ", ".join(missing))
            if extra:
                detail.append("unexpected " + ", ".join(extra))
            problems.append(f"{label}: " + "; ".join(detail))
    return ValidationReport(not problems, tuple(problems))


def four_ary_nondecomposable() -> ConnectivePair:
    """The standard 4-ary connective given by the two crossing pair-partitions
    {{1,2},{3,4}} and {{1,3},{2,4}}; not realizable by any tensor/par formula."""
    left = PartitionSet.of(
        4,
        [
            Partition.of([[1, 2], [3, 4]]),
            Partition.of([[1, 3], [2, 4]]),
        ],
    )
    right = PartitionSet.of(
        4,
        [
            Partition.of([[1, 4], [2], [3]]),
            Partition.of([[2, 3], [1], [4]]),
        ],
    )
    return ConnectivePair(4, left, right, name="G4")
