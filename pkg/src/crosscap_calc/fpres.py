"""Finite presentations of the level-2 congruence subgroup and its
mod-2 quotient by the slide-swap elements.

Three presentation variants are built here, all on the slide symbols
``Y[i, j]``:

* ``PROP_1_TO_4``: relator families (1)-(4) on the generators with
  first index at most g - 1.  Every relator is a matrix identity and
  ``verify_relators`` checks exactly that.
* ``COR_WITH_5``: the same plus family (5), the Tietze extension that
  defines ``Y[g, i]`` as a product of the other generators.
* ``QUOTIENT_BAR``: the induced presentation of the quotient by the
  normal closure of the elements ``Y[j, i]^-1 Y[i, j]``.  In the
  quotient the two index orders coincide, so its generators are the
  unordered pairs ``i < j``.  These relators hold in the quotient, not
  in the matrix group, and are deliberately never matrix-verified.

Families bar-(1) and bar-(2) make the quotient an elementary abelian
2-group, so its relators abelianize to GF(2) rows and the quotient rank
is a bit-matrix rank computation (``quotient_rank``).  The subgroup
generated by the squares of Dehn twists sits at index 2, whence
``twist_quotient_rank`` is one less.

``phi_image`` sends the symbolic generators that have a homology action
to their matrices: slides to ``make_y``/``make_y_gi``, a squared twist
``t^2[a(i,j)]`` to ``Y[j, i]^-1 Y[i, j]``, a two-sided twist
``t[b(i,j)]`` to ``Y[i, j]^2``.  Squared twists about the subset curves
have no closed matrix form here and are rejected.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import exactmat
from .exactmat import GenusLike, IntMatrix, IndexRangeError, genus
from .reports import CheckReport, ReportBuilder

KIND_YSLIDE = "yslide"
KIND_TWIST_SQ = "twist_sq"
KIND_BETA_TWIST = "beta_twist"
KIND_SUBSET_SQ = "subset_sq"

_KIND_LABEL = {
    KIND_YSLIDE: "Y",
    KIND_TWIST_SQ: "T2",
    KIND_BETA_TWIST: "B",
    KIND_SUBSET_SQ: "T2S",
}

VARIANT_PROP = "PROP_1_TO_4"
VARIANT_COR = "COR_WITH_5"
VARIANT_QUOTIENT = "QUOTIENT_BAR"
VARIANTS = (VARIANT_PROP, VARIANT_COR, VARIANT_QUOTIENT)

#: every relator pass is a soundness statement only
CAVEAT_SOUNDNESS = (
    "soundness only: matrix identities confirm the relators hold, they"
    " cannot certify that the presentation is complete"
)

Pair = tuple[int, int]


class UnsupportedSymbolError(ValueError):
    """The symbol has no matrix image in this representation."""


class InconsistentQuotientError(ArithmeticError):
    """The bar-(5) relations failed to determine the quotient classes.

    This cannot happen if the quotient presentation is consistent; it
    aborts loudly rather than return a wrong map.
    """


@dataclass(frozen=True, order=True)
class GenSymbol:
    """One symbolic generator: a slide, a squared twist about the loop
    through crosscaps i and j, a twist about the two-sided curve around
    crosscaps i and j, or a squared twist about the curve around an
    even index subset."""

    kind: str
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in _KIND_LABEL:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        idx = self.indices
        if any(not isinstance(x, int) or x < 1 for x in idx):
            raise ValueError(f"indices must be positive ints, got {idx}")
        if self.kind == KIND_YSLIDE:
            if len(idx) != 2 or idx[0] == idx[1]:
                raise ValueError(f"slide needs two distinct indices, got {idx}")
        elif self.kind in (KIND_TWIST_SQ, KIND_BETA_TWIST):
            if len(idx) != 2 or not idx[0] < idx[1]:
                raise ValueError(f"twist indices must satisfy i < j, got {idx}")
        else:
            if len(idx) < 2 or len(idx) % 2 != 0:
                raise ValueError(f"subset must have even size >= 2, got {idx}")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"subset must be strictly increasing, got {idx}")

    def label(self) -> str:
        return f"{_KIND_LABEL[self.kind]}({','.join(map(str, self.indices))})"


def yslide(i: int, j: int) -> GenSymbol:
    return GenSymbol(KIND_YSLIDE, (i, j))


def twist_sq(i: int, j: int) -> GenSymbol:
    return GenSymbol(KIND_TWIST_SQ, (i, j))


def beta_twist(i: int, j: int) -> GenSymbol:
    return GenSymbol(KIND_BETA_TWIST, (i, j))


def subset_sq(*indices: int) -> GenSymbol:
    return GenSymbol(KIND_SUBSET_SQ, tuple(indices))


#: a word is a tuple of (symbol, exponent) letters with exponent +-1
Word = tuple[tuple[GenSymbol, int], ...]


def word(*letters: GenSymbol | tuple[GenSymbol, int]) -> Word:
    out = []
    for item in letters:
        if isinstance(item, GenSymbol):
            out.append((item, 1))
        else:
            sym, exp = item
            if exp not in (1, -1):
                raise ValueError(f"exponent must be +1 or -1, got {exp}")
            out.append((sym, exp))
    return tuple(out)


def winv(w: Word) -> Word:
    return tuple((sym, -exp) for sym, exp in reversed(w))


def wpow(w: Word, k: int) -> Word:
    if k < 0:
        return wpow(winv(w), -k)
    return w * k


def conjugate(f: Word, w: Word) -> Word:
    """f w f^-1."""
    return f + w + winv(f)


def commutator_word(a: Word, b: Word) -> Word:
    return a + b + winv(a) + winv(b)


def word_label(w: Word) -> str:
    if not w:
        return "1"
    return ".".join(
        s.label() if e == 1 else s.label() + "^-1" for s, e in w
    )


@dataclass(frozen=True)
class Relator:
    family: str
    indices: tuple[int, ...]
    word: Word

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "indices": list(self.indices),
            "word": [[sym.label(), exp] for sym, exp in self.word],
        }


@dataclass(frozen=True)
class Presentation:
    g: int
    variant: str
    generators: tuple[GenSymbol, ...]
    relators: tuple[Relator, ...]

    def families(self) -> dict[str, list[Relator]]:
        out: dict[str, list[Relator]] = {}
        for rel in self.relators:
            out.setdefault(rel.family, []).append(rel)
        return out

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "variant": self.variant,
            "generators": [s.label() for s in self.generators],
            "relators": [r.to_json() for r in self.relators],
        }


def _sq(*pairs: Pair) -> Word:
    w = word(*(yslide(i, j) for i, j in pairs))
    return w + w


def _prop_relators(g: int) -> Iterator[Relator]:
    rng_i = range(1, g)      # first slide index
    rng_j = range(1, g + 1)  # second slide index
    # family (1): each slide is an involution
    for i in rng_i:
        for j in rng_j:
            if j != i:
                yield Relator("1", (i, j), _sq((i, j)))
    # family (2): squares of two-slide products, shared second index or
    # fully disjoint indices
    for i in rng_i:
        for j in rng_j:
            if j == i:
                continue
            for k in rng_i:
                if k not in (i, j):
                    yield Relator("2a", (i, j, k), _sq((i, j), (k, j)))
    for i in rng_i:
        for j in rng_j:
            if j == i:
                continue
            for k in rng_i:
                if k in (i, j):
                    continue
                for l in rng_j:
                    if l not in (i, j, k):
                        yield Relator("2b", (i, j, k, l), _sq((i, j), (k, l)))
    # family (3): squares of three-slide products through a shared index
    for i in rng_i:
        for j in rng_i:
            if j == i:
                continue
            for k in rng_j:
                if k not in (i, j):
                    yield Relator("3a", (i, j, k), _sq((i, j), (i, k), (j, k)))
    for i in rng_i:
        for j in rng_j:
            if j == i:
                continue
            for k in rng_j:
                if k in (i, j):
                    continue
                for l in rng_j:
                    if l not in (i, j, k):
                        yield Relator("3b", (i, j, k, l), _sq((i, j), (i, k), (i, l)))
    # family (4): square of the six-slide cycle word on three indices
    for i in rng_i:
        for j in rng_i:
            if j == i:
                continue
            for k in rng_i:
                if k in (i, j):
                    continue
                yield Relator(
                    "4", (i, j, k),
                    _sq((j, i), (i, j), (k, j), (j, k), (i, k), (k, i)),
                )


def relator5_word(g: int, i: int) -> Word:
    """(Y[1,i] Y[1,g]) ... (Y[g-1,i] Y[g-1,g]) Y[i,g] Y[g,i]^-1, k=i omitted."""
    letters: list[tuple[GenSymbol, int]] = []
    for k in range(1, g):
        if k == i:
            continue
        letters.append((yslide(k, i), 1))
        letters.append((yslide(k, g), 1))
    letters.append((yslide(i, g), 1))
    letters.append((yslide(g, i), -1))
    return tuple(letters)


def _cor_relators(g: int) -> Iterator[Relator]:
    yield from _prop_relators(g)
    for i in range(1, g):
        yield Relator("5", (i,), relator5_word(g, i))


def pair_set(g: int) -> tuple[Pair, ...]:
    """All unordered index pairs i < j <= g, in lexicographic order."""
    return tuple((i, j) for i in range(1, g + 1) for j in range(i + 1, g + 1))


def bar5_word(g: int, i: int) -> Word:
    """(Y[1,i] Y[1,g]) ... (Y[i-1,i] Y[i-1,g]) (Y[i,i+1] Y[i+1,g]) ...
    (Y[i,g-1] Y[g-1,g]), all first indices below second (quotient form)."""
    letters: list[tuple[GenSymbol, int]] = []
    for k in range(1, i):
        letters.append((yslide(k, i), 1))
        letters.append((yslide(k, g), 1))
    for k in range(i + 1, g):
        letters.append((yslide(i, k), 1))
        letters.append((yslide(k, g), 1))
    return tuple(letters)


def bar5_odd_word(g: int) -> Word:
    return word(*(yslide(k, g) for k in range(1, g)))


def _quotient_relators(g: int) -> Iterator[Relator]:
    pairs = pair_set(g)
    # bar-(1): involutions
    for i, j in pairs:
        yield Relator("bar1", (i, j), _sq((i, j)))
    # bar-(2): commutation squares, four index shapes
    for j in range(1, g + 1):
        for i in range(1, j):
            for k in range(1, j):
                if k != i:
                    yield Relator("bar2a", (i, j, k), _sq((i, j), (k, j)))
    for i in range(1, g + 1):
        for j in range(i + 1, g + 1):
            for l in range(i + 1, g + 1):
                if l != j:
                    yield Relator("bar2b", (i, j, l), _sq((i, j), (i, l)))
    for i in range(1, g + 1):
        for j in range(i + 1, g + 1):
            for l in range(j + 1, g + 1):
                yield Relator("bar2c", (i, j, l), _sq((i, j), (j, l)))
    for (i, j), (k, l) in itertools.combinations(pairs, 2):
        if len({i, j, k, l}) == 4:
            yield Relator("bar2d", (i, j, k, l), _sq((i, j), (k, l)))
    # bar-(5): the defining products of the dropped generators
    for i in range(2, g):
        yield Relator("bar5", (i,), bar5_word(g, i))
    if g % 2 == 1:
        yield Relator("bar5odd", (), bar5_odd_word(g))


def build_presentation(g: GenusLike, variant: str) -> Presentation:
    g = genus(g)
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    if variant == VARIANT_PROP:
        gens = tuple(
            yslide(i, j) for i in range(1, g) for j in range(1, g + 1) if j != i
        )
        rels = tuple(_prop_relators(g))
    elif variant == VARIANT_COR:
        gens = tuple(
            yslide(i, j)
            for i in range(1, g + 1)
            for j in range(1, g + 1)
            if j != i and (i < g or j < g)
        )
        rels = tuple(_cor_relators(g))
    else:
        gens = tuple(yslide(i, j) for i, j in pair_set(g))
        rels = tuple(_quotient_relators(g))
    return Presentation(g=g, variant=variant, generators=gens, relators=rels)


def eval_symbol_word(g: GenusLike, w: Word) -> IntMatrix:
    """Evaluate a word in slide symbols to a matrix."""
    letters = []
    for sym, exp in w:
        if sym.kind != KIND_YSLIDE:
            raise UnsupportedSymbolError(
                f"{sym.label()} is not a slide symbol; use phi_word_matrix"
            )
        letters.append((sym.indices, exp))
    return exactmat.eval_word(g, letters)


def verify_relators(p: Presentation) -> CheckReport:
    """Check every relator of a matrix-verifiable variant evaluates to I.

    The QUOTIENT_BAR relators hold only in the quotient, so asking to
    matrix-verify them is a usage error, not a failing report.
    """
    if p.variant == VARIANT_QUOTIENT:
        raise ValueError(
            "QUOTIENT_BAR relators hold in the quotient, not the matrix group;"
            " they are checked through the quotient map instead"
        )
    rb = ReportBuilder(f"relators:{p.variant}", g=p.g)
    rb.caveat(CAVEAT_SOUNDNESS)
    ident = exactmat.identity(p.g - 1)
    for rel in p.relators:
        ok = eval_symbol_word(p.g, rel.word) == ident
        rb.record(ok, f"{rel.family}{rel.indices}")
    return rb.build()


def verify_commutation_lemma(g: GenusLike) -> CheckReport:
    """Y[i, j] commutes with Y[g, j] for every valid i, j pair.

    Needed so that the family (5) products are well defined regardless
    of factor order.
    """
    g = genus(g)
    rb = ReportBuilder("commutation", g=g)
    for i in range(1, g):
        for j in range(1, g):
            if j == i:
                continue
            a = exactmat.make_y(g, i, j)
            b = exactmat.make_y_gi(g, j)
            rb.record(a * b == b * a, f"[Y[{i},{j}],Y[{g},{j}]] != 1")
    return rb.build()


def degenerate_representation_control(g: GenusLike) -> bool:
    """True iff some non-relator word evaluates to a non-identity matrix.

    Guards against a degenerate representation that would make every
    relator check pass vacuously.
    """
    g = genus(g)
    m = eval_symbol_word(g, wpow(word(yslide(1, 2), yslide(1, 3)), 3))
    return m != exactmat.identity(g - 1)


# ---------------------------------------------------------------------------
# the GF(2) quotient


def _popcount_parity(x: int) -> int:
    return x.bit_count() & 1


def _f2_row_rank(rows: Iterable[int]) -> int:
    pivots: list[int] = []
    for row in rows:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
    return len(pivots)


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """Images of the symbolic generators in the GF(2) quotient.

    The quotient of the level-2 group by the normal closure of the
    slide-swap elements is an elementary abelian 2-group with basis the
    pair classes ``(i, j)`` with ``2 <= i < j <= g``, plus ``(1, g)``
    when g is even.  Images are bitmasks over that basis; bit positions
    follow ``self.basis``.
    """

    g: int
    basis: tuple[Pair, ...]
    first_row: tuple[tuple[int, int], ...]  # (j, mask) for the (1, j) classes

    @functools.cached_property
    def _bit(self) -> dict[Pair, int]:
        return {p: n for n, p in enumerate(self.basis)}

    @functools.cached_property
    def _first(self) -> dict[int, int]:
        return dict(self.first_row)

    def pair_image(self, i: int, j: int) -> int:
        i, j = min(i, j), max(i, j)
        if not 1 <= i < j <= self.g:
            raise IndexRangeError(f"pair ({i},{j}) outside genus {self.g}")
        if (i, j) in self._bit:
            return 1 << self._bit[(i, j)]
        return self._first[j]

    def image(self, sym: GenSymbol) -> int:
        """Quotient image of a symbol as a bitmask over ``basis``."""
        if sym.kind == KIND_YSLIDE:
            return self.pair_image(*sym.indices)
        if sym.kind in (KIND_TWIST_SQ, KIND_BETA_TWIST, KIND_SUBSET_SQ):
            # these lie in the normal closure being quotiented away
            return 0
        raise UnsupportedSymbolError(sym.label())

    def word_image(self, w: Word) -> int:
        acc = 0
        for sym, _exp in w:  # in a 2-group the exponent sign is irrelevant
            acc ^= self.image(sym)
        return acc

    @property
    def rank(self) -> int:
        return len(self.basis)


def quotient_basis(g: GenusLike) -> tuple[Pair, ...]:
    """The pair classes forming a basis of the quotient: all (i, j) with
    2 <= i < j <= g, plus (1, g) when g is even."""
    g = genus(g)
    basis = [(i, j) for i in range(2, g + 1) for j in range(i + 1, g + 1)]
    if g % 2 == 0:
        basis.append((1, g))
    return tuple(sorted(basis))


@functools.cache
def build_quotient_map(g: GenusLike) -> QuotientMap:
    """Solve the bar-(5) relations for the classes of the (1, j) slides.

    Every pair class with both indices >= 2 (plus (1, g) for even g) is
    declared a basis vector; the remaining (1, j) classes are the
    unknowns of the GF(2) linear system read off the bar-(5) relators.
    The system must have a unique solution and the solved map must kill
    every quotient relator, otherwise the construction aborts.
    """
    g = genus(g)
    basis = quotient_basis(g)
    bit = {p: n for n, p in enumerate(basis)}
    unknowns = [j for j in range(2, g + 1) if (1, j) not in bit]
    upos = {j: n for n, j in enumerate(unknowns)}

    def term(i: int, j: int) -> tuple[int, int]:
        """(unknown-coefficients, known-mask) for one pair class."""
        i, j = min(i, j), max(i, j)
        if (i, j) in bit:
            return 0, 1 << bit[(i, j)]
        return 1 << upos[j], 0

    equations: list[tuple[int, int]] = []
    pres = build_presentation(g, VARIANT_QUOTIENT)
    for rel in pres.relators:
        if not rel.family.startswith("bar5"):
            continue
        coeff, rhs = 0, 0
        for sym, _exp in rel.word:
            c, k = term(*sym.indices)
            coeff ^= c
            rhs ^= k
        equations.append((coeff, rhs))

    # GF(2) elimination for a unique solution of the unknown classes
    solution = [0] * len(unknowns)
    pivots: dict[int, tuple[int, int]] = {}
    for coeff, rhs in equations:
        for p, (pc, pr) in pivots.items():
            if coeff >> p & 1:
                coeff ^= pc
                rhs ^= pr
        if coeff == 0:
            if rhs != 0:
                raise InconsistentQuotientError("contradictory bar-(5) relations")
            continue
        pivots[coeff.bit_length() - 1] = (coeff, rhs)
    if len(pivots) != len(unknowns):
        raise InconsistentQuotientError("bar-(5) relations leave a free class")
    # each pivot row writes its unknown in terms of strictly lower
    # positions, so substitution must walk the positions upward
    for p in sorted(pivots):
        coeff, rhs = pivots[p]
        rest = coeff & ~(1 << p)
        while rest:
            q = rest.bit_length() - 1
            rhs ^= solution[q]
            rest &= ~(1 << q)
        solution[p] = rhs

    first_row = []
    for j in range(2, g + 1):
        if (1, j) in bit:
            first_row.append((j, 1 << bit[(1, j)]))
        else:
            first_row.append((j, solution[upos[j]]))
    qmap = QuotientMap(g=g, basis=basis, first_row=tuple(first_row))

    for rel in pres.relators:
        if qmap.word_image(rel.word) != 0:
            raise InconsistentQuotientError(
                f"solved map fails quotient relator {rel.family}{rel.indices}"
            )
    return qmap


@functools.cache
def quotient_rank(g: GenusLike) -> int:
    """GF(2) dimension of the quotient, by row reduction of the full
    abelianized relator matrix over all pair generators."""
    g = genus(g)
    pres = build_presentation(g, VARIANT_QUOTIENT)
    pairs = pair_set(g)
    bit = {p: n for n, p in enumerate(pairs)}
    rows = []
    for rel in pres.relators:
        row = 0
        for sym, _exp in rel.word:
            row ^= 1 << bit[sym.indices]
        rows.append(row)
    return len(pairs) - _f2_row_rank(rows)


def twist_quotient_rank(g: GenusLike) -> int:
    """Rank of the twist-subgroup quotient: one less, because the twist
    subgroup has index 2 and the quotient is elementary abelian."""
    return quotient_rank(g) - 1


# ---------------------------------------------------------------------------
# matrix images of the twist symbols


@functools.cache
def phi_image(g: GenusLike, sym: GenSymbol) -> IntMatrix:
    """Homology matrix of a symbolic generator.

    Slides map to their defining matrices.  A squared twist about the
    loop through crosscaps i < j maps to ``Y[j, i]^-1 Y[i, j]``; a twist
    about the two-sided curve around them maps to ``Y[i, j]^2``.  The
    subset twists have no closed form here and are rejected.
    """
    g = genus(g)
    if sym.kind == KIND_YSLIDE:
        i, j = sym.indices
        if not (1 <= i <= g and 1 <= j <= g):
            raise IndexRangeError(f"{sym.label()} outside genus {g}")
        return exactmat.y_matrix(g, i, j)
    if sym.kind == KIND_TWIST_SQ:
        i, j = sym.indices
        return exactmat.mat_inv(exactmat.y_matrix(g, j, i)) * exactmat.y_matrix(g, i, j)
    if sym.kind == KIND_BETA_TWIST:
        i, j = sym.indices
        m = exactmat.y_matrix(g, i, j)
        return m * m
    raise UnsupportedSymbolError(
        f"{sym.label()} has no matrix image in this representation"
    )


@functools.cache
def _phi_inverse(g: int, sym: GenSymbol) -> IntMatrix:
    return exactmat.mat_inv(phi_image(g, sym))


def phi_word_matrix(g: GenusLike, w: Word) -> IntMatrix:
    g = genus(g)
    acc = exactmat.identity(g - 1)
    for sym, exp in w:
        acc = acc * (phi_image(g, sym) if exp == 1 else _phi_inverse(g, sym))
    return acc


def symbol_kernel_report(g: GenusLike) -> CheckReport:
    """Every squared twist and two-sided twist image is level-2 and dies
    in the quotient: the symbolic kernel elements really live in the
    subgroup being quotiented away."""
    g = genus(g)
    rb = ReportBuilder("symbol-kernel", g=g)
    qmap = build_quotient_map(g)
    for i in range(1, g + 1):
        for j in range(i + 1, g + 1):
            for sym in (twist_sq(i, j), beta_twist(i, j)):
                m = phi_image(g, sym)
                rb.record(exactmat.is_level2(m), f"{sym.label()} not level-2")
                rb.record(qmap.image(sym) == 0, f"{sym.label()} image nonzero")
    return rb.build()
