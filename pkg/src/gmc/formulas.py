"""Formula ASTs for the multiplicative fragments, a text parser, canonical
forms up to commutativity/associativity, partition-set behaviors, normal
formulas, and exhaustive enumeration of tensor/par formulas.

The ASCII grammar: atoms ``a1, a2, ...``; ``*`` tensor, ``|`` par, ``+`` the
additive disjunction (top level only), ``-o`` linear implication
(right-associative), ``!``/``?`` modal prefixes, ``~`` atom negation, ``&``
the additive conjunction (arises only as the negation image of ``+``).
Mixed binary operators always need parentheses; chains of one operator are
read n-ary.  Auxiliary atoms ``p1, p2, ...`` are permitted inside modal
subformulas in the exponential language.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Union

from .partitions import (
    CapExceededError,
    Partition,
    PartitionSet,
    all_partitions,
    is_orthogonal,
)

DEFAULT_ENUMERATION_CAP = 6
DEFAULT_BEHAVIOR_CAP = 9


class ParseError(ValueError):
    """Syntax or linearity error in a formula string; carries a position."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


@dataclass(frozen=True)
class Atom:
    index: int
    negated: bool = False


@dataclass(frozen=True)
class Aux:
    """Auxiliary atom (printed ``p<label>``); only meaningful under modals."""

    label: int
    negated: bool = False


@dataclass(frozen=True)
class Tensor:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Par:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Plus:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class With:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Lollipop:
    """Linear implication; ``antecedents`` are implicitly tensored."""

    antecedents: tuple["Formula", ...]
    consequent: "Formula"


@dataclass(frozen=True)
class Bang:
    child: "Formula"


@dataclass(frozen=True)
class WhyNot:
    child: "Formula"


Formula = Union[Atom, Aux, Tensor, Par, Plus, With, Lollipop, Bang, WhyNot]

_NARY = {Tensor: Tensor, Par: Par, Plus: Plus, With: With}


def tensor(*children: Formula) -> Formula:
    return children[0] if len(children) == 1 else Tensor(tuple(children))


def par(*children: Formula) -> Formula:
    return children[0] if len(children) == 1 else Par(tuple(children))


def plus(*children: Formula) -> Formula:
    return children[0] if len(children) == 1 else Plus(tuple(children))


def atom(index: int, negated: bool = False) -> Atom:
    return Atom(index, negated)


def atom_indices(f: Formula) -> tuple[int, ...]:
    """Sorted indices of the principal (non-auxiliary) atoms of f."""
    out: list[int] = []

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            out.append(g.index)
        elif isinstance(g, Aux):
            pass
        elif isinstance(g, (Bang, WhyNot)):
            walk(g.child)
        elif isinstance(g, Lollipop):
            for a in g.antecedents:
                walk(a)
            walk(g.consequent)
        else:
            for c in g.children:
                walk(c)

    walk(f)
    return tuple(sorted(out))


def size(f: Formula) -> int:
    if isinstance(f, (Atom, Aux)):
        return 1
    if isinstance(f, (Bang, WhyNot)):
        return 1 + size(f.child)
    if isinstance(f, Lollipop):
        return 1 + sum(size(a) for a in f.antecedents) + size(f.consequent)
    return 1 + sum(size(c) for c in f.children)


def modal_depth(f: Formula) -> int:
    if isinstance(f, (Atom, Aux)):
        return 0
    if isinstance(f, (Bang, WhyNot)):
        return 1 + modal_depth(f.child)
    if isinstance(f, Lollipop):
        return max([modal_depth(a) for a in f.antecedents] + [modal_depth(f.consequent)])
    return max(modal_depth(c) for c in f.children)


def contains_bang(f: Formula) -> bool:
    if isinstance(f, Bang):
        return True
    if isinstance(f, (Atom, Aux)):
        return False
    if isinstance(f, WhyNot):
        return contains_bang(f.child)
    if isinstance(f, Lollipop):
        return any(contains_bang(a) for a in f.antecedents) or contains_bang(f.consequent)
    return any(contains_bang(c) for c in f.children)


def contains_modal(f: Formula) -> bool:
    if isinstance(f, (Bang, WhyNot)):
        return True
    if isinstance(f, (Atom, Aux)):
        return False
    if isinstance(f, Lollipop):
        return any(contains_modal(a) for a in f.antecedents) or contains_modal(f.consequent)
    return any(contains_modal(c) for c in f.children)


def formula_key(f: Formula) -> tuple:
    """Total structural order on formulas; used for deterministic output and
    for the 'lexicographically least witness' rule."""
    if isinstance(f, Atom):
        return (0, f.index, f.negated)
    if isinstance(f, Aux):
        return (1, f.label, f.negated)
    if isinstance(f, Bang):
        return (2, formula_key(f.child))
    if isinstance(f, WhyNot):
        return (3, formula_key(f.child))
    if isinstance(f, Tensor):
        return (4, tuple(formula_key(c) for c in f.children))
    if isinstance(f, Par):
        return (5, tuple(formula_key(c) for c in f.children))
    if isinstance(f, Lollipop):
        return (
            6,
            tuple(formula_key(a) for a in f.antecedents),
            formula_key(f.consequent),
        )
    if isinstance(f, Plus):
        return (7, tuple(formula_key(c) for c in f.children))
    return (8, tuple(formula_key(c) for c in f.children))


def _child_key(f: Formula) -> tuple:
    """Disjoint children sort by least principal atom, aux-only parts last."""
    indices = atom_indices(f)
    return (indices[0] if indices else float("inf"), formula_key(f))


def canonicalize(f: Formula) -> Formula:
    """Flatten associative nests and sort children; idempotent, and two
    formulas interconvertible by commutativity/associativity agree on it."""
    if isinstance(f, (Atom, Aux)):
        return f
    if isinstance(f, Bang):
        return Bang(canonicalize(f.child))
    if isinstance(f, WhyNot):
        return WhyNot(canonicalize(f.child))
    if isinstance(f, Lollipop):
        ants: list[Formula] = []
        for a in f.antecedents:
            a = canonicalize(a)
            if isinstance(a, Tensor):
                ants.extend(a.children)
            else:
                ants.append(a)
        ants.sort(key=_child_key)
        return Lollipop(tuple(ants), canonicalize(f.consequent))
    kind = type(f)
    flat: list[Formula] = []
    for c in f.children:
        c = canonicalize(c)
        if isinstance(c, kind):
            flat.extend(c.children)
        else:
            flat.append(c)
    if len(flat) == 1:
        return flat[0]
    if kind in (Plus, With):
        flat.sort(key=formula_key)
    else:
        flat.sort(key=_child_key)
    return kind(tuple(flat))


# ---------------------------------------------------------------------------
# printing


def _needs_parens(child: Formula) -> bool:
    return isinstance(child, (Tensor, Par, Plus, With, Lollipop))


def _render(f: Formula) -> str:
    if isinstance(f, Atom):
        return ("~" if f.negated else "") + f"a{f.index}"
    if isinstance(f, Aux):
        return ("~" if f.negated else "") + f"p{f.label}"
    if isinstance(f, Bang):
        c = _render(f.child)
        return "!" + (f"({c})" if _needs_parens(f.child) else c)
    if isinstance(f, WhyNot):
        c = _render(f.child)
        return "?" + (f"({c})" if _needs_parens(f.child) else c)
    if isinstance(f, (Tensor, Par)):
        op = "*" if isinstance(f, Tensor) else "|"
        parts = [
            f"({_render(c)})" if _needs_parens(c) else _render(c) for c in f.children
        ]
        return op.join(parts)
    if isinstance(f, (Plus, With)):
        op = " + " if isinstance(f, Plus) else " & "
        parts = [
            f"({_render(c)})" if _needs_parens(c) else _render(c) for c in f.children
        ]
        return op.join(parts)
    # Lollipop: antecedents joined by *, right-associative consequent
    if len(f.antecedents) == 1 and not _needs_parens(f.antecedents[0]):
        left = _render(f.antecedents[0])
    else:
        left = "(" + "*".join(
            f"({_render(a)})" if _needs_parens(a) else _render(a)
            for a in f.antecedents
        ) + ")"
    right = _render(f.consequent)
    if _needs_parens(f.consequent) and not isinstance(f.consequent, Lollipop):
        right = f"({right})"
    return f"{left} -o {right}"


def to_text(f: Formula) -> str:
    return _render(f)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(a\d+|p\d+|-o|[*|+&!?()~])")

LANGUAGES = ("mll", "mall", "imll", "emll")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
            break
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, int]], language: str):
        self.tokens = tokens
        self.i = 0
        self.language = language

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int | None:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.peek()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}", self.pos())
        self.i += 1

    def parse_top(self) -> Formula:
        f = self.parse_chain(top=True)
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r}", self.pos())
        return f

    def parse_chain(self, top: bool = False) -> Formula:
        first = self.parse_unary()
        op = self.peek()
        if op not in ("*", "|", "+", "&", "-o"):
            return first
        self._check_op(op, top)
        if op == "-o":
            self.take()
            rest = self.parse_chain()  # right-associative
            ants = first.children if isinstance(first, Tensor) else (first,)
            return Lollipop(ants, rest)
        items = [first]
        while self.peek() == op:
            self.take()
            items.append(self.parse_unary())
        nxt = self.peek()
        if nxt in ("*", "|", "+", "&", "-o"):
            raise ParseError(
                f"mixed operators {op!r} and {nxt!r} need parentheses", self.pos()
            )
        node = {"*": Tensor, "|": Par, "+": Plus, "&": With}[op]
        return node(tuple(items))

    def _check_op(self, op: str, top: bool) -> None:
        allowed = {
            "mll": {"*", "|"},
            "mall": {"*", "|", "+", "&"},
            "imll": {"*", "-o"},
            "emll": {"*", "|"},
        }[self.language]
        if op not in allowed:
            raise ParseError(f"operator {op!r} not in {self.language.upper()}", self.pos())
        if op in ("+", "&") and not top:
            raise ParseError(f"{op!r} is only allowed at the top level", self.pos())

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            inner = self.parse_chain()
            self.expect(")")
            return inner
        if tok == "~":
            if self.language == "imll":
                raise ParseError("negation marks are not part of IMLL input", self.pos())
            self.take()
            leaf = self.parse_unary()
            if isinstance(leaf, Atom):
                return Atom(leaf.index, not leaf.negated)
            if isinstance(leaf, Aux):
                return Aux(leaf.label, not leaf.negated)
            raise ParseError("'~' applies to atoms only", self.pos())
        if tok in ("!", "?"):
            if self.language != "emll":
                raise ParseError(f"modal {tok!r} not in {self.language.upper()}", self.pos())
            self.take()
            child = self.parse_unary()
            return Bang(child) if tok == "!" else WhyNot(child)
        if tok is not None and tok.startswith("a"):
            self.take()
            return Atom(int(tok[1:]))
        if tok is not None and tok.startswith("p"):
            if self.language != "emll":
                raise ParseError("auxiliary atoms only exist in EMLL", self.pos())
            self.take()
            return Aux(int(tok[1:]))
        raise ParseError(f"unexpected token {tok!r}", self.pos())


def parse(text: str, language: str = "mll") -> Formula:
    """Parse a formula; validates linearity (each atom index occurs once and
    the indices are contiguous 1..n).  Children of a top-level ``+``/``&``
    are each linear over one common atom set."""
    if language not in LANGUAGES:
        raise ValueError(f"unknown language {language!r}")
    f = _Parser(_tokenize(text), language).parse_top()
    if isinstance(f, (Plus, With)):
        alphabets = set()
        canon = set()
        for c in f.children:
            _check_linear(c)
            alphabets.add(atom_indices(c))
            canon.add(canonicalize(c))
        if len(alphabets) > 1:
            raise ParseError("additive children use different atom sets")
        if len(canon) < len(f.children):
            raise ParseError("additive children must be pairwise distinct")
    else:
        _check_linear(f)
    return f


def _check_linear(f: Formula) -> None:
    indices: list[int] = []
    aux: list[int] = []

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            indices.append(g.index)
        elif isinstance(g, Aux):
            aux.append(g.label)
        elif isinstance(g, (Bang, WhyNot)):
            walk(g.child)
        elif isinstance(g, Lollipop):
            for a in g.antecedents:
                walk(a)
            walk(g.consequent)
        else:
            for c in g.children:
                walk(c)

    walk(f)
    for seq, kind in ((indices, "atom"), (aux, "auxiliary atom")):
        dupes = sorted({i for i in seq if seq.count(i) > 1})
        if dupes:
            raise ParseError(f"{kind} repeated: {dupes}")
    if indices:
        missing = sorted(set(range(1, max(indices) + 1)) - set(indices))
        if missing:
            raise ParseError(f"missing atom index: {missing}")


# ---------------------------------------------------------------------------
# negation


def negate(f: Formula) -> Formula:
    """Negation pushed to atoms: swaps tensor/par, plus/with, bang/whynot."""
    if isinstance(f, Atom):
        return Atom(f.index, not f.negated)
    if isinstance(f, Aux):
        return Aux(f.label, not f.negated)
    if isinstance(f, Tensor):
        return Par(tuple(negate(c) for c in f.children))
    if isinstance(f, Par):
        return Tensor(tuple(negate(c) for c in f.children))
    if isinstance(f, Plus):
        return With(tuple(negate(c) for c in f.children))
    if isinstance(f, With):
        return Plus(tuple(negate(c) for c in f.children))
    if isinstance(f, Bang):
        return WhyNot(negate(f.child))
    if isinstance(f, WhyNot):
        return Bang(negate(f.child))
    raise ValueError("no negation normal form for linear implication")


# ---------------------------------------------------------------------------
# behavior: the partition set a tensor/par formula realizes


def _tensor_combine(left: frozenset, right: frozenset) -> frozenset:
    return frozenset(p | q for p in left for q in right)


def _par_combine(left: frozenset, right: frozenset) -> frozenset:
    out = set()
    for p in left:
        for q in right:
            for c in p:
                for c2 in q:
                    merged = (p - {c}) | (q - {c2}) | {c | c2}
                    out.add(frozenset(merged))
    return frozenset(out)


def _merge_recursion_sets(f: Formula) -> frozenset:
    """Generating partitions of a tensor/par formula: tensor takes disjoint
    unions, par merges one class from each side.

    This folds the n-ary nodes left to right, so it is *not* invariant under
    reassociation and underapproximates the derivable groupings (a tensor
    split inside one par component may interleave with the others).  Its
    orthogonal complement is bracketing-invariant, which is what
    :func:`behavior` uses.
    """
    if isinstance(f, Atom):
        return frozenset({frozenset({frozenset({f.index})})})
    if isinstance(f, Tensor):
        acc = _merge_recursion_sets(f.children[0])
        for c in f.children[1:]:
            acc = _tensor_combine(acc, _merge_recursion_sets(c))
        return acc
    if isinstance(f, Par):
        acc = _merge_recursion_sets(f.children[0])
        for c in f.children[1:]:
            acc = _par_combine(acc, _merge_recursion_sets(c))
        return acc
    raise ValueError(
        f"behavior is defined for tensor/par formulas only, got {type(f).__name__}"
    )


def behavior(f: Formula, cap: int = DEFAULT_BEHAVIOR_CAP) -> PartitionSet:
    """The exact set of partitions of the atom set realizable as premise
    groupings when the formula's sequent is decomposed bottom-up with the
    tensor/par rules.

    Computed in closed form as the orthogonal complement of the negated
    formula's merge-recursion set; verified against the rule-level backward
    search :func:`behavior_by_proof_search` exhaustively on small arities.
    """
    indices = atom_indices(f)
    n = len(indices)
    if n > cap:
        raise CapExceededError(f"{n} atoms exceeds behavior cap {cap}")
    if set(indices) != set(range(1, n + 1)):
        raise ValueError("formula atoms must be exactly 1..n")
    generators = [
        Partition.of([sorted(c) for c in s], arity=n)
        for s in _merge_recursion_sets(negate(canonicalize(f)))
    ]
    members = [
        q
        for q in all_partitions(n, cap=max(n, DEFAULT_BEHAVIOR_CAP))
        if all(is_orthogonal(q, s) for s in generators)
    ]
    return PartitionSet.of(n, members)


# ---------------------------------------------------------------------------
# backward proof-search oracle (reference implementation for tests)


def _binarize(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return f
    kind = type(f)
    kids = [_binarize(c) for c in f.children]
    node = kids[0]
    for c in kids[1:]:
        node = kind((node, c))
    return node


def behavior_by_proof_search(f: Formula) -> PartitionSet:
    """Alternative behavior computation by exhaustive backward application of
    the binary tensor/par rules starting from the formula's sequent; the
    tensor rule splits the remaining sequent in all ways.  Slow; kept as the
    independent cross-check anchoring :func:`behavior` to the rules."""
    indices = atom_indices(f)
    n = len(indices)
    root = _binarize(canonicalize(f))
    memo: dict[tuple, frozenset] = {}

    def search(seq: tuple[Formula, ...]) -> frozenset:
        # returns set of partitions (frozenset of frozensets) of seq's atoms
        if all(isinstance(x, Atom) for x in seq):
            return frozenset({frozenset({frozenset(x.index for x in seq)})})
        key = tuple(sorted(seq, key=formula_key))
        if key in memo:
            return memo[key]
        out: set = set()
        for i, x in enumerate(seq):
            rest = seq[:i] + seq[i + 1 :]
            if isinstance(x, Par):
                a, b = x.children
                out |= search(rest + (a, b))
            elif isinstance(x, Tensor):
                a, b = x.children
                for r in range(len(rest) + 1):
                    for combo in itertools.combinations(range(len(rest)), r):
                        chosen = set(combo)
                        left = tuple(rest[j] for j in range(len(rest)) if j in chosen)
                        right = tuple(rest[j] for j in range(len(rest)) if j not in chosen)
                        for pa in search(left + (a,)):
                            for pb in search(right + (b,)):
                                out.add(pa | pb)
        memo[key] = frozenset(out)
        return memo[key]

    members = [
        Partition.of([sorted(c) for c in p], arity=n) for p in search((root,))
    ]
    return PartitionSet.of(n, members)


# ---------------------------------------------------------------------------
# normal formulas and enumeration


def normal_formula(p: Partition) -> Formula:
    """The tensor of the pars of each class; the unique formula (up to
    commutativity/associativity) whose behavior is exactly {p}."""
    factors = [
        Atom(c[0]) if len(c) == 1 else Par(tuple(Atom(e) for e in c))
        for c in p.classes
    ]
    return factors[0] if len(factors) == 1 else Tensor(tuple(factors))


def enumerate_formulas(
    n: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[Formula]:
    """Yield every linear tensor/par formula on atoms 1..n exactly once up to
    commutativity/associativity, in canonical form."""
    if n < 1:
        raise ValueError("need at least one atom")
    if n > cap:
        raise CapExceededError(f"arity {n} exceeds enumeration cap {cap}")

    @lru_cache(maxsize=None)
    def gen(elements: frozenset, forbid: type | None) -> tuple[Formula, ...]:
        if len(elements) == 1:
            (e,) = elements
            return (Atom(e),)
        out: list[Formula] = []
        universe = sorted(elements)
        for kind in (Tensor, Par):
            if kind is forbid:
                continue
            for classes in _set_partitions(tuple(universe)):
                if len(classes) < 2:
                    continue
                pools = [gen(frozenset(c), kind) for c in classes]
                for combo in itertools.product(*pools):
                    out.append(kind(tuple(sorted(combo, key=_child_key))))
        return tuple(out)

    for f in gen(frozenset(range(1, n + 1)), None):
        yield f


def _set_partitions(elements: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not elements:
        yield ()
        return
    first, rest = elements[0], elements[1:]
    for sub in _set_partitions(rest):
        for i, c in enumerate(sub):
            yield sub[:i] + ((first,) + c,) + sub[i + 1 :]
        yield ((first,),) + sub
