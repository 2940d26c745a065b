"""Rewriting the level-2 generators into the twist subgroup.

The quotient of the level-2 group by the squared-twist-and-Torelli
subgroup is elementary abelian with basis the pair classes of
``fpres.quotient_basis``.  The ordered products of basis slides (one
slide per pair, pairs strictly increasing) form a Schreier transversal:
dropping the last factor of a transversal word gives another one.  The
Reidemeister-Schreier generators of the subgroup are then

    f x^(+-1) rep(f x)^(-1)

for ``f`` in the transversal and ``x`` in the finite generating set of
the level-2 group, where ``rep`` is the transversal element in the same
coset; the generator is skipped only when the word literally equals its
representative.  These rewrite into four families: conjugated squared
twists about pair loops, conjugated twists about the two-sided pair
curves, conjugated squared twists about the 4-subset curves containing
crosscap 1, and conjugated slide commutators, the last reducible under
the constraint last(f) < (i, j) < (k, l).

The slide-commutator reduction rests on four displayed identities, one
per overlap shape of the two pairs.  ``verify_case_identities`` checks
them as exact integer matrix identities through ``fpres.phi_image``.
The matrix representation kills the Torelli group, so a pass certifies
each identity modulo that kernel: necessary, not sufficient, and every
report says so.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from typing import Iterator

from . import exactmat, fpres
from .exactmat import GenusLike, genus
from .fpres import (
    GenSymbol,
    KIND_YSLIDE,
    Pair,
    Word,
    beta_twist,
    build_quotient_map,
    phi_word_matrix,
    quotient_basis,
    subset_sq,
    twist_sq,
    winv,
    word,
    yslide,
)
from .gf2 import CapExceededError
from .reports import CheckReport, ReportBuilder

#: 2^dim transversal elements; past 16 dimensions this is not a desk job
TRANSVERSAL_DIM_CAP = 16

#: above this many words, zero-image checks fold letters only on a sample
LETTER_FOLD_LIMIT = 300_000

CAVEAT_TORELLI = (
    "matrix equality is computed in the homology representation, whose"
    " kernel is the Torelli group: a pass verifies each identity modulo"
    " that kernel (necessary, not sufficient)"
)
CAVEAT_QUOTIENT_LEVEL = (
    "membership is certified at the quotient-image level; the conjugating"
    " single twists are not squares and have no symbol of their own, and"
    " conjugation does not move quotient images"
)
CAVEAT_G3_GENERATORS = (
    "the minimal generating set theorem assumes g >= 4; at g = 3 the"
    " slide symbols alone are used instead, which is not a generating"
    " set taken from any stated theorem"
)


@dataclass(frozen=True, order=True)
class TransversalElement:
    """One coset representative: a strictly increasing tuple of basis pairs."""

    pairs: tuple[Pair, ...]

    def __post_init__(self) -> None:
        for a, b in zip(self.pairs, self.pairs[1:]):
            if not a < b:
                raise ValueError(f"pairs must strictly increase, got {self.pairs}")

    def word(self) -> Word:
        return word(*(yslide(i, j) for i, j in self.pairs))

    def prefix(self) -> "TransversalElement":
        if not self.pairs:
            raise ValueError("the empty word has no proper prefix")
        return TransversalElement(self.pairs[:-1])


@dataclass(frozen=True)
class RsGenerator:
    f: TransversalElement
    x: GenSymbol
    sign: int
    word: Word


@functools.cache
def transversal(g: GenusLike) -> tuple[TransversalElement, ...]:
    """All subsets of the basis pair set as sorted tuples, in lex order."""
    g = genus(g)
    basis = quotient_basis(g)
    if len(basis) > TRANSVERSAL_DIM_CAP:
        raise CapExceededError(
            f"transversal has 2^{len(basis)} elements, past the"
            f" dimension cap {TRANSVERSAL_DIM_CAP}"
        )
    subsets = [
        TransversalElement(tuple(c))
        for m in range(len(basis) + 1)
        for c in itertools.combinations(basis, m)
    ]
    return tuple(sorted(subsets, key=lambda t: t.pairs))


def uses_subset_twist_generators(g: GenusLike) -> bool:
    """True when the generating set includes four-index subset twists;
    below genus 4 no such twist exists and slides alone are substituted."""
    return genus(g) >= 4


def level2_generating_set(g: GenusLike) -> tuple[GenSymbol, ...]:
    """The minimal generating set of the level-2 group for g >= 4:
    slides Y[i, j] for i < j, slides Y[j, i] for i < j <= g - 1, and the
    squared subset twists on {1, j, k, l}.  For g = 3 the slide symbols
    alone are substituted (see CAVEAT_G3_GENERATORS)."""
    g = genus(g)
    if g < 3:
        raise ValueError("need g >= 3")
    slides = [yslide(i, j) for i in range(1, g + 1) for j in range(i + 1, g + 1)]
    back_slides = [yslide(j, i) for i in range(1, g) for j in range(i + 1, g)]
    if g == 3:
        return tuple(slides + back_slides)
    subsets = [
        subset_sq(1, j, k, l)
        for j in range(2, g + 1)
        for k in range(j + 1, g + 1)
        for l in range(k + 1, g + 1)
    ]
    return tuple(slides + back_slides + subsets)


def _basis_masks(g: int) -> tuple[dict[Pair, int], dict[int, TransversalElement]]:
    qmap = build_quotient_map(g)
    bit = {p: 1 << n for n, p in enumerate(qmap.basis)}
    by_mask: dict[int, TransversalElement] = {}
    for t in transversal(g):
        mask = 0
        for p in t.pairs:
            mask ^= bit[p]
        by_mask[mask] = t
    return bit, by_mask


def iter_rs_generators(g: GenusLike) -> Iterator[RsGenerator]:
    """All f x^(+-1) rep^(-1) words, skipping literal representatives.

    Deterministic order: transversal elements lexicographically, then
    generating symbols in listed order, then sign +1 before -1.
    """
    g = genus(g)
    qmap = build_quotient_map(g)
    bit, by_mask = _basis_masks(g)
    basis = set(qmap.basis)
    inv_by_mask = {m: winv(t.word()) for m, t in by_mask.items()}
    xs = [(x, qmap.image(x)) for x in level2_generating_set(g)]
    for f in transversal(g):
        fmask = 0
        for p in f.pairs:
            fmask ^= bit[p]
        fword = f.word()
        for x, xmask in xs:
            rep = by_mask[fmask ^ xmask]
            rep_inv = inv_by_mask[fmask ^ xmask]
            for sign in (1, -1):
                if (
                    sign == 1
                    and x.kind == KIND_YSLIDE
                    and x.indices in basis
                    and rep.pairs == f.pairs + (x.indices,)
                ):
                    continue  # f x literally is its own representative
                yield RsGenerator(f=f, x=x, sign=sign, word=fword + ((x, sign),) + rep_inv)


def rs_generators(g: GenusLike) -> tuple[RsGenerator, ...]:
    return tuple(iter_rs_generators(g))


FAMILY_NAMES = ("1", "2", "3", "4")


#: one labeled family word: (transversal element, index tuple, full word)
FamilyWord = tuple[TransversalElement, tuple[int, ...], Word]


def iter_family_words(
    g: GenusLike, family: str, reduced4: bool = False
) -> Iterator[FamilyWord]:
    """Words of one generator family, labeled by conjugator and indices.

    Family 1: f t^2[a(i,j)] f^-1 over all pairs; family 2 the same with
    the two-sided twists; family 3 the squared subset twists on
    {1, j, k, l}; family 4 the slide commutators f [Y(i,j), Y(k,l)] f^-1
    over all ordered pairs of pairs, restricted by
    last(f) < (i, j) < (k, l) when ``reduced4`` is set.
    """
    g = genus(g)
    if family not in FAMILY_NAMES:
        raise ValueError(f"unknown family {family!r}, expected one of {FAMILY_NAMES}")
    pairs = fpres.pair_set(g)
    for f in transversal(g):
        fword = f.word()
        finv = winv(fword)
        last = f.pairs[-1] if f.pairs else None
        if family == "1":
            for i, j in pairs:
                yield f, (i, j), fword + word(twist_sq(i, j)) + finv
        elif family == "2":
            for i, j in pairs:
                yield f, (i, j), fword + word(beta_twist(i, j)) + finv
        elif family == "3":
            for sub in itertools.combinations(range(2, g + 1), 3):
                yield f, (1, *sub), fword + word(subset_sq(1, *sub)) + finv
        else:
            for p, q in itertools.product(pairs, repeat=2):
                if reduced4 and not ((last is None or last < p) and p < q):
                    continue
                core = fpres.commutator_word(word(yslide(*p)), word(yslide(*q)))
                yield f, (*p, *q), fword + core + finv


def family_generators(
    g: GenusLike, reduced4: bool = False
) -> dict[str, list[FamilyWord]]:
    g = genus(g)
    return {
        family: list(iter_family_words(g, family, reduced4=reduced4))
        for family in FAMILY_NAMES
    }


def construction_counts(g: GenusLike) -> dict:
    """Sizes of the transversal, the RS generator set, and the families."""
    g = genus(g)
    n_trans = len(transversal(g))
    n_rs = sum(1 for _ in iter_rs_generators(g))
    n_pairs = len(fpres.pair_set(g))
    n_subsets = len(list(itertools.combinations(range(2, g + 1), 3)))
    return {
        "g": g,
        "transversal_size": n_trans,
        "rs_generator_count": n_rs,
        "families": {
            "1": n_trans * n_pairs,
            "2": n_trans * n_pairs,
            "3": n_trans * n_subsets,
            "4": n_trans * n_pairs * n_pairs,
        },
    }


def verify_transversal(g: GenusLike) -> CheckReport:
    """Size 2^rank, prefix closure, and bijection onto the quotient."""
    g = genus(g)
    rb = ReportBuilder("transversal", g=g)
    elems = transversal(g)
    rank = fpres.quotient_rank(g)
    rb.record(len(elems) == 1 << rank, f"size {len(elems)} != 2^{rank}")
    qmap = build_quotient_map(g)
    images = set()
    elem_set = set(elems)
    for t in elems:
        images.add(qmap.word_image(t.word()))
        if t.pairs:
            rb.record(t.prefix() in elem_set, f"prefix of {t.pairs} missing")
    rb.record(len(images) == len(elems), "quotient images are not distinct")
    return rb.build()


def verify_rs_zero_images(
    g: GenusLike, seed: int = 0, sample_size: int = 50_000
) -> CheckReport:
    """Every RS generator word has quotient image zero.

    Images are linear over letters, so each word's image is the exact
    XOR of its three parts (transversal word, symbol, representative),
    each folded from letters once.  Up to LETTER_FOLD_LIMIT words the
    check also refolds every assembled word letter by letter; past it,
    a seeded sample is refolded and the report says so.
    """
    g = genus(g)
    qmap = build_quotient_map(g)
    bit, by_mask = _basis_masks(g)
    basis = set(qmap.basis)
    xs = [(x, qmap.image(x)) for x in level2_generating_set(g)]
    total_bound = len(transversal(g)) * len(xs) * 2
    fold_all = total_bound <= LETTER_FOLD_LIMIT
    rb = ReportBuilder("rs-zero-image", g=g)
    if not uses_subset_twist_generators(g):
        rb.caveat(CAVEAT_G3_GENERATORS)
    rng = random.Random(seed)
    emitted = 0
    folded = 0
    for f in transversal(g):
        fmask = 0
        for p in f.pairs:
            fmask ^= bit[p]
        for x, xmask in xs:
            rep = by_mask[fmask ^ xmask]
            for sign in (1, -1):
                if (
                    sign == 1
                    and x.kind == KIND_YSLIDE
                    and x.indices in basis
                    and rep.pairs == f.pairs + (x.indices,)
                ):
                    continue
                emitted += 1
                repmask = 0
                for p in rep.pairs:
                    repmask ^= bit[p]
                ok = fmask ^ xmask ^ repmask == 0
                if fold_all or rng.randrange(total_bound) < sample_size:
                    w = f.word() + ((x, sign),) + winv(rep.word())
                    ok = ok and qmap.word_image(w) == 0
                    folded += 1
                if not ok:
                    rb.record(False, f"f={f.pairs} x={x.label()} sign={sign}")
                else:
                    rb.passed += 1
    rb.detail(f"emitted {emitted} generators, letter-folded {folded}")
    if not fold_all:
        rb.detail(
            f"letter-level refolds sampled with seed {seed}; part-level"
            " images checked for all words"
        )
    return rb.build()


def verify_family_zero_images(
    g: GenusLike,
    families: tuple[str, ...] = ("1", "2", "3"),
    seed: int = 0,
    sample_size: int = 50_000,
) -> CheckReport:
    """Every family word has quotient image zero.

    Defaults to the three theorem families; pass ("1","2","3","4") to
    include the slide-commutator family of the lemma as well.  The
    quotient image is XOR-linear over letters, so a conjugate f w f^-1
    has the image of w alone; that core image is checked once per index
    tuple, which covers every conjugate.  Up to LETTER_FOLD_LIMIT words
    the check also refolds every assembled word letter by letter; past
    it, a seeded sample is refolded and the report says so.
    """
    g = genus(g)
    qmap = build_quotient_map(g)
    rb = ReportBuilder("family-zero-image", g=g)
    counts = construction_counts(g)["families"]
    total_bound = sum(counts[family] for family in families)
    fold_all = total_bound <= LETTER_FOLD_LIMIT
    rng = random.Random(seed)
    folded = 0
    for family in families:
        count = 0
        cores_ok: dict[tuple[int, ...], bool] = {}
        for f, indices, w in iter_family_words(g, family):
            count += 1
            core_ok = cores_ok.get(indices)
            if core_ok is None:
                # strip the conjugator: f.word() + core + inverse
                n = len(f.word())
                core = w[n : len(w) - n] if n else w
                core_ok = qmap.word_image(core) == 0
                cores_ok[indices] = core_ok
            ok = core_ok
            if fold_all or rng.randrange(total_bound) < sample_size:
                folded += 1
                ok = ok and qmap.word_image(w) == 0
            if not ok:
                rb.record(False, f"family {family} f={f.pairs} indices {indices}")
            else:
                rb.passed += 1
        rb.detail(f"family {family}: {count} words")
    rb.detail(f"letter-folded {folded} assembled words")
    if not fold_all:
        rb.detail(
            f"letter-level refolds sampled with seed {seed}; core images"
            " checked for every index tuple, covering all conjugates"
        )
    return rb.build()


def verify_reduced4_constraint(g: GenusLike) -> CheckReport:
    """Every emitted reduced commutator generator satisfies the
    syntactic constraint last(f) < (i, j) < (k, l)."""
    g = genus(g)
    rb = ReportBuilder("family4-reduced", g=g)
    count = 0
    for f, indices, _w in iter_family_words(g, "4", reduced4=True):
        count += 1
        last = f.pairs[-1] if f.pairs else None
        p, q = indices[:2], indices[2:]
        ok = (last is None or last < p) and p < q
        rb.record(ok, f"f={f.pairs} pairs {p},{q}")
    rb.detail(f"{count} reduced generators")
    return rb.build()


# ---------------------------------------------------------------------------
# the four case identities

CASE_SHARED_FIRST = "i=k"
CASE_SHARED_SECOND = "j=l"
CASE_CHAINED = "j=k"
CASE_INTERLEAVED = "i<k<j<l"
CASE_SEPARATED = "i<j<k<l"
CASE_NESTED = "i<k<l<j"


def classify_pair_case(p: Pair, q: Pair) -> str:
    """Overlap shape of two slide index pairs with p < q lexicographically."""
    if not p < q:
        raise ValueError(f"need (i,j) < (k,l) lexicographically, got {p}, {q}")
    (i, j), (k, l) = p, q
    if i == k:
        return CASE_SHARED_FIRST
    if j == l:
        return CASE_SHARED_SECOND
    if j == k:
        return CASE_CHAINED
    if i < k < j < l:
        return CASE_INTERLEAVED
    if i < j < k < l:
        return CASE_SEPARATED
    if i < k < l < j:
        return CASE_NESTED
    raise AssertionError(f"unclassified pair shape {p}, {q}")


def case_identity_words(p: Pair, q: Pair) -> tuple[str, Word, Word]:
    """(case name, left side, right side) for one pair of slide pairs.

    The left side is the squared product or the commutator of the two
    slides; the right side is the displayed rewriting into conjugated
    squared twists, two-sided twists, and slides.  For the two disjoint
    shapes the commutator itself collapses, so the right side is empty.
    """
    case = classify_pair_case(p, q)
    (i, j), (k, l) = p, q
    y = lambda a, b: (yslide(a, b), 1)
    yi = lambda a, b: (yslide(a, b), -1)
    t = lambda a, b: (twist_sq(a, b), 1)
    ti = lambda a, b: (twist_sq(a, b), -1)
    b = lambda a_, b_: (beta_twist(a_, b_), 1)
    bi = lambda a_, b_: (beta_twist(a_, b_), -1)
    if case == CASE_SHARED_FIRST:
        lhs = (y(i, j), y(k, l)) * 2
        rhs = (t(j, l), bi(i, j), y(i, j), ti(j, l), yi(i, j), b(i, j))
        return case, lhs, rhs
    if case == CASE_SHARED_SECOND:
        lhs = fpres.commutator_word(word(yslide(i, j)), word(yslide(k, l)))
        rhs = (y(k, j), b(i, k), yi(k, j))
        return case, lhs, rhs
    if case == CASE_CHAINED:
        lhs = (y(i, j), y(k, l)) * 2
        # the splice inserts Y[i,j] Y[j,i]^-1, which is the INVERSE squared
        # twist under the convention t^2 = Y[j,i]^-1 Y[i,j] (both slides
        # square to the same two-sided twist), so ti enters twice here
        rhs = (
            y(i, j), y(j, l), ti(i, j), yi(j, l), yi(i, j),
            ti(i, j), bi(j, l), t(i, l), b(j, l),
            y(j, l), bi(j, l), ti(i, l), b(j, l), yi(j, l),
        )
        return case, lhs, rhs
    if case == CASE_INTERLEAVED:
        lhs = fpres.commutator_word(word(yslide(i, j)), word(yslide(k, l)))
        rhs = (
            y(i, j),
            bi(i, l), y(i, l), b(i, k), yi(i, l), b(i, l), b(i, k),
            yi(i, j),
            bi(i, k), bi(i, l),
            y(i, l), bi(i, k), yi(i, l),
            b(i, l),
        )
        return case, lhs, rhs
    # disjoint shapes: the slides commute outright
    lhs = fpres.commutator_word(word(yslide(i, j)), word(yslide(k, l)))
    return case, lhs, ()


def verify_case_identities(
    g: GenusLike, samples: list[tuple[Pair, Pair]] | None = None
) -> CheckReport:
    """Matrix check of every case identity, exhaustive by default.

    ``samples`` restricts to the given (p, q) pair tuples.  The check
    computes both sides through the homology representation, which is
    blind to the Torelli group; the caveat records that.
    """
    g = genus(g)
    rb = ReportBuilder("case-identities", g=g)
    rb.caveat(CAVEAT_TORELLI)
    if samples is None:
        samples = list(itertools.combinations(fpres.pair_set(g), 2))
    counts: dict[str, int] = {}
    for p, q in samples:
        case, lhs, rhs = case_identity_words(p, q)
        counts[case] = counts.get(case, 0) + 1
        ok = phi_word_matrix(g, lhs) == phi_word_matrix(g, rhs)
        rb.record(ok, f"case {case} pairs {p},{q}")
    for case in sorted(counts):
        rb.detail(f"case {case}: {counts[case]} tuples")
    return rb.build()


def verify_tst_membership(g: GenusLike, indices: tuple[int, ...]) -> CheckReport:
    """The conjugated squared twists of one even index tuple die in the
    quotient and act by level-2 matrices.

    T(s, t) is the squared twist about the (i_s, i_(s+1)) loop conjugated
    by the chain of single twists down to i_t.  Single twists are not
    squares and have no symbol here, but conjugation cannot move a
    quotient image, so membership is certified from the core alone; the
    caveat names that verification level.
    """
    g = genus(g)
    indices = tuple(indices)
    if len(indices) % 2 != 0 or len(indices) < 2:
        raise ValueError(f"need an even number of indices, got {indices}")
    if list(indices) != sorted(set(indices)):
        raise ValueError(f"indices must strictly increase, got {indices}")
    if indices[-1] > g or indices[0] < 1:
        raise ValueError(f"indices {indices} outside 1..{g}")
    qmap = build_quotient_map(g)
    rb = ReportBuilder("tst-membership", g=g)
    rb.caveat(CAVEAT_QUOTIENT_LEVEL)
    rb.detail(f"indices {indices}")
    k = len(indices)
    for s in range(k - 1):
        for t_ in range(s + 1, k):
            core = twist_sq(indices[s], indices[s + 1])
            chain = [
                (indices[r], indices[r + 1]) for r in range(s + 1, t_)
            ]
            label = f"T({s + 1},{t_ + 1}) core {core.label()} chain {chain}"
            rb.record(qmap.image(core) == 0, f"{label}: image nonzero")
            rb.record(
                exactmat.is_level2(fpres.phi_image(g, core)),
                f"{label}: core matrix not level-2",
            )
    return rb.build()
