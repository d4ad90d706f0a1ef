"""Decision procedures for decomposability: exhaustive tensor/par search,
additive decomposition with rendered derivations, the failed de-Morgan-dual
check for the additive witnesses, and a census of connectives per arity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .formulas import (
    Formula,
    Par,
    Plus,
    Atom,
    atom_indices,
    behavior,
    canonicalize,
    enumerate_formulas,
    formula_key,
    negate,
    normal_formula,
    to_text,
)
from .partitions import (
    CapExceededError,
    ConnectivePair,
    Partition,
    PartitionSet,
    all_partitions,
    is_orthogonal,
    validate_connective,
)

MLL, MALL, IMLL, EMLL = "mll", "mall", "imll", "emll"
DECOMPOSABLE = "decomposable"
NON_DECOMPOSABLE = "non-decomposable"
UNKNOWN = "unknown"


# ---------------------------------------------------------------------------
# sequents and proof trees


@dataclass(frozen=True)
class ContextRef:
    """Opaque context placeholder; rendered Γ<label> and never instantiated."""

    label: int


SequentItem = object  # Formula | ContextRef


@dataclass(frozen=True)
class Sequent:
    """A (possibly two-sided) sequent of formulas and context placeholders."""

    right: tuple[SequentItem, ...]
    left: tuple[SequentItem, ...] = ()


@dataclass(frozen=True)
class ProofTree:
    """A rendered derivation: premises above, conclusion below.

    Leaves (no premises, empty rule) are open assumptions.  ``note`` carries
    an annotation such as the reason a cut is stuck.
    """

    conclusion: Sequent
    rule: str = ""
    premises: tuple["ProofTree", ...] = ()
    note: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.premises

    def open_premises(self) -> tuple[Sequent, ...]:
        if self.is_leaf:
            return (self.conclusion,)
        out: list[Sequent] = []
        for p in self.premises:
            out.extend(p.open_premises())
        return tuple(out)


@dataclass(frozen=True)
class DecompositionVerdict:
    system: str
    status: str
    witness: Formula | None = None
    proofs: tuple[ProofTree, ...] = ()
    candidates_examined: int = 0
    detail: str = ""

    @property
    def decomposable(self) -> bool:
        return self.status == DECOMPOSABLE


# ---------------------------------------------------------------------------
# derivation builders (shape of the additive decomposition figure)


def partition_derivation(
    p: Partition, conclusion_formula: Formula, plus_step: bool
) -> ProofTree:
    """Derivation of ``⊢ Γ1..Γm, conclusion`` whose open premises are exactly
    the classes of p with one context placeholder each: per-class par steps,
    one tensor step, and optionally a final additive selection step."""
    contexts = [ContextRef(i + 1) for i in range(len(p.classes))]
    branches: list[ProofTree] = []
    for cls, ctx in zip(p.classes, contexts):
        leaf = ProofTree(Sequent(tuple(Atom(e) for e in cls) + (ctx,)))
        if len(cls) > 1:
            merged = Par(tuple(Atom(e) for e in cls))
            branches.append(
                ProofTree(Sequent((merged, ctx)), rule="⅋", premises=(leaf,))
            )
        else:
            branches.append(leaf)
    base = normal_formula(p)
    if len(branches) == 1:
        tree = branches[0]
        # a single class already concludes in the normal formula (pure par)
    else:
        tree = ProofTree(
            Sequent((base, *contexts)), rule="⊗", premises=tuple(branches)
        )
    if plus_step:
        tree = ProofTree(
            Sequent((conclusion_formula, *contexts)), rule="⊕", premises=(tree,)
        )
    return tree


# ---------------------------------------------------------------------------
# multiplicative decomposability (exhaustive search)


def decompose_mll(c: ConnectivePair, cap: int = 6) -> DecompositionVerdict:
    """Search every linear tensor/par formula on n atoms (up to comm/assoc)
    for one whose behavior is exactly ``c.left``; the least candidate in the
    canonical formula order wins."""
    report = validate_connective(c)
    warn = "" if report else "warning: connective fails validation; "
    if c.arity > cap:
        return DecompositionVerdict(
            MLL, UNKNOWN, detail=f"{warn}arity {c.arity} exceeds enumeration cap {cap}"
        )
    target = set(c.left.members)
    want = len(target)
    examined = 0
    witnesses: list[Formula] = []
    for f in enumerate_formulas(c.arity, cap=cap):
        examined += 1
        b = behavior(f)
        if len(b) != want:  # cardinality prune
            continue
        if set(b.members) == target:
            witnesses.append(f)
    if witnesses:
        best = min(witnesses, key=formula_key)
        proofs = tuple(
            partition_derivation(p, best, plus_step=False) for p in c.left
        )
        return DecompositionVerdict(
            MLL,
            DECOMPOSABLE,
            witness=best,
            proofs=proofs,
            candidates_examined=examined,
            detail=warn + f"behavior({to_text(best)}) = left set",
        )
    return DecompositionVerdict(
        MLL,
        NON_DECOMPOSABLE,
        candidates_examined=examined,
        detail=warn + f"exhausted all {examined} canonical formulas on {c.arity} atoms",
    )


def decompose_mall(c: ConnectivePair) -> tuple[Formula, tuple[ProofTree, ...]]:
    """Additive decomposition: the sum over p in ``c.left`` of p's normal
    formula, with one derivation per p showing the open premises matching
    p's classes.  Total for every connective with a nonempty left set."""
    if not c.left.members:
        raise ValueError("connective has an empty left set")
    parts = list(c.left)  # canonical partition order fixes the sum's order
    factors = [normal_formula(p) for p in parts]
    witness = factors[0] if len(factors) == 1 else Plus(tuple(factors))
    proofs = tuple(
        partition_derivation(p, witness, plus_step=len(factors) > 1) for p in parts
    )
    return witness, proofs


# ---------------------------------------------------------------------------
# de Morgan duality check for additive witnesses


class AlphabetMismatchError(ValueError):
    """The two formulas are not over complementary atom alphabets."""


def _negation_marks(f: Formula) -> dict[int, bool]:
    marks: dict[int, bool] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            marks[g.index] = g.negated
        elif hasattr(g, "children"):
            for ch in g.children:
                walk(ch)
        elif hasattr(g, "child"):
            walk(g.child)

    walk(f)
    return marks


def check_demorgan_dual(f: Formula, g: Formula) -> bool:
    """True iff g is the negation normal form of ~f.

    Requires complementary alphabets: same atom indices, with every atom
    negated in exactly one of the two formulas.
    """
    mf, mg = _negation_marks(f), _negation_marks(g)
    if set(mf) != set(mg) or any(mf[i] == mg[i] for i in mf):
        raise AlphabetMismatchError(
            "formulas must use the same atom indices with opposite negation marks"
        )
    return canonicalize(negate(f)) == canonicalize(g)


def stuck_cut_tree(c: ConnectivePair) -> ProofTree:
    """Demonstration tree for the undefined cut between the additive witness
    of a connective and the additive witness of its dual: the would-be cut
    node is annotated with the failed duality check."""
    f, _ = decompose_mall(c)
    g_plain, _ = decompose_mall(c.swap())
    g = _negate_atoms(g_plain)
    left_ctx = [ContextRef(i + 1) for i in range(max(len(p.classes) for p in c.left))]
    right_ctx = [ContextRef(100 + i + 1) for i in range(max(len(p.classes) for p in c.right))]
    left = ProofTree(Sequent((f, *left_ctx)), rule="⊕⊗⅋ (collapsed)", premises=())
    right = ProofTree(Sequent((g, *right_ctx)), rule="⊕⊗⅋ (collapsed)", premises=())
    try:
        dual_ok = check_demorgan_dual(f, g)
    except AlphabetMismatchError:
        dual_ok = False
    note = (
        None
        if dual_ok
        else "stuck: cut formulas are additive sums that are not de Morgan dual"
    )
    return ProofTree(
        Sequent(tuple(left_ctx + right_ctx)),
        rule="cut",
        premises=(left, right),
        note=note,
    )


def _negate_atoms(f: Formula) -> Formula:
    """Flip every atom's negation mark, keeping the connective structure."""
    if isinstance(f, Atom):
        return Atom(f.index, not f.negated)
    if hasattr(f, "children"):
        return type(f)(tuple(_negate_atoms(ch) for ch in f.children))
    if hasattr(f, "child"):
        return type(f)(_negate_atoms(f.child))
    raise ValueError(f"cannot negate atoms of {type(f).__name__}")


# ---------------------------------------------------------------------------
# census of connectives per arity


@dataclass(frozen=True)
class CensusRow:
    connective: ConnectivePair
    verdict: DecompositionVerdict


@dataclass(frozen=True)
class CensusReport:
    arity: int
    rows: tuple[CensusRow, ...]
    exhaustive: bool

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def decomposable(self) -> int:
        return sum(1 for r in self.rows if r.verdict.status == DECOMPOSABLE)

    @property
    def non_decomposable(self) -> int:
        return sum(1 for r in self.rows if r.verdict.status == NON_DECOMPOSABLE)


def _orthogonality_masks(universe: list[Partition], polarized: bool = False) -> list[int]:
    masks = [0] * len(universe)
    for i, p in enumerate(universe):
        for j in range(i, len(universe)):
            if is_orthogonal(p, universe[j], polarized):
                masks[i] |= 1 << j
                if j != i:
                    masks[j] |= 1 << i
    return masks


def _dual_mask(subset: int, masks: list[int], full: int) -> int:
    out = full
    i = 0
    s = subset
    while s:
        if s & 1:
            out &= masks[i]
        s >>= 1
        i += 1
    return out


def census(
    n: int, max_generators: int = 4, formula_cap: int = 6
) -> CensusReport:
    """Classify every connective of arity n (pairs of mutually dual nonempty
    partition sets) by tensor/par decomposability.

    Exhaustive over all subsets of partitions for n <= 4; for n = 5 only
    closures of generating sets of at most ``max_generators`` partitions.
    """
    if n > 5:
        raise CapExceededError("census supports arity <= 5")
    universe = list(all_partitions(n))
    b = len(universe)
    full = (1 << b) - 1
    masks = _orthogonality_masks(universe)
    exhaustive = n <= 4
    if exhaustive:
        candidates: Iterable[int] = range(1 << b)
    else:
        candidates = (
            sum(1 << i for i in combo)
            for k in range(max_generators + 1)
            for combo in itertools.combinations(range(b), k)
        )
    seen: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for subset in candidates:
        right = _dual_mask(subset, masks, full)
        left = _dual_mask(right, masks, full)
        if left == 0 or right == 0 or left in seen:
            continue
        seen.add(left)
        pairs.append((left, right))

    def to_set(mask: int) -> PartitionSet:
        return PartitionSet.of(
            n, [universe[i] for i in range(b) if mask & (1 << i)]
        )

    # behaviors of all canonical formulas, for O(1) witness lookup
    by_behavior: dict[frozenset, list[Formula]] = {}
    examined = 0
    for f in enumerate_formulas(n, cap=formula_cap):
        examined += 1
        by_behavior.setdefault(frozenset(behavior(f).members), []).append(f)

    rows = []
    for left_mask, right_mask in sorted(pairs):
        left, right = to_set(left_mask), to_set(right_mask)
        conn = ConnectivePair(n, left, right)
        hits = by_behavior.get(frozenset(left.members))
        if hits:
            best = min(hits, key=formula_key)
            verdict = DecompositionVerdict(
                MLL,
                DECOMPOSABLE,
                witness=best,
                candidates_examined=examined,
                detail=f"behavior({to_text(best)}) = left set",
            )
        else:
            verdict = DecompositionVerdict(
                MLL,
                NON_DECOMPOSABLE,
                candidates_examined=examined,
                detail=f"exhausted all {examined} canonical formulas on {n} atoms",
            )
        rows.append(CensusRow(conn, verdict))
    rows.sort(key=lambda r: tuple(p.sort_key() for p in r.connective.left))
    return CensusReport(n, tuple(rows), exhaustive)
