"""Bit-packed GF(2) linear algebra and the orthogonal group O_2(g).

The mod-2 homology of a genus-g non-orientable surface carries the
standard dot product as intersection form, with the crosscap classes as
an orthonormal basis.  A Dehn twist about a curve with class ``v`` acts
by the transvection ``x -> x + (x . v) v``, which is orthogonal exactly
when ``v`` has even weight.  This module enumerates the full orthogonal
group by extending orthonormal frames column by column, generates it by
breadth-first closure over chosen transvections, and can express any
element as a canonical shortest word in a labelled generating set.

Vectors are ints with bit ``i - 1`` holding coordinate ``i``; matrices
are tuples of row bitmasks.  Everything is immutable and deterministic:
BFS visits parents in discovery order and generators in sorted label
order, so the word assigned to each element is the lexicographically
least among the shortest ones.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .reports import CheckReport, ReportBuilder

#: frame enumeration is exponential in g; beyond this it is not a desk job
ENUMERATION_CAP = 6

#: the index-subset sizes whose transvections are used as generators
GENERATOR_SIZES = (2, 4)

Subset = tuple[int, ...]


class CapExceededError(ValueError):
    """The requested size is past the configured desk-scale cap."""


class NotInGroupError(ValueError):
    """BFS exhausted the generated subgroup without reaching the target."""


@dataclass(frozen=True, order=True)
class F2Vector:
    g: int
    bits: int

    def __post_init__(self) -> None:
        if self.g < 1:
            raise ValueError("need g >= 1")
        if not 0 <= self.bits < 1 << self.g:
            raise ValueError(f"bits {self.bits:#x} out of range for g={self.g}")

    @classmethod
    def unit(cls, g: int, i: int) -> "F2Vector":
        if not 1 <= i <= g:
            raise ValueError(f"unit index {i} outside 1..{g}")
        return cls(g, 1 << (i - 1))

    @classmethod
    def from_indices(cls, g: int, indices: Iterable[int]) -> "F2Vector":
        bits = 0
        for i in indices:
            bits |= 1 << (i - 1)
        return cls(g, bits)

    def __xor__(self, other: "F2Vector") -> "F2Vector":
        if self.g != other.g:
            raise ValueError("length mismatch")
        return F2Vector(self.g, self.bits ^ other.bits)

    def weight(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.g) if self.bits >> i & 1)

    def to_string(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.g))


def dot(u: F2Vector, v: F2Vector) -> int:
    if u.g != v.g:
        raise ValueError("length mismatch")
    return (u.bits & v.bits).bit_count() & 1


@dataclass(frozen=True, order=True)
class F2Matrix:
    g: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.g:
            raise ValueError("row count must equal g")
        for r in self.rows:
            if not 0 <= r < 1 << self.g:
                raise ValueError("row out of range")

    @classmethod
    def identity(cls, g: int) -> "F2Matrix":
        return cls(g, tuple(1 << i for i in range(g)))

    @classmethod
    def from_columns(cls, g: int, cols: Iterable[int]) -> "F2Matrix":
        cols = tuple(cols)
        rows = tuple(
            sum((col >> i & 1) << j for j, col in enumerate(cols)) for i in range(g)
        )
        return cls(g, rows)

    def column(self, j: int) -> int:
        """Column j as a bitmask, 1-based."""
        return sum((self.rows[i] >> (j - 1) & 1) << i for i in range(self.g))

    def transpose(self) -> "F2Matrix":
        return F2Matrix.from_columns(self.g, self.rows)

    def __mul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.g != other.g:
            raise ValueError("size mismatch")
        rows = []
        for r in self.rows:
            acc = 0
            bits = r
            while bits:
                low = bits & -bits
                acc ^= other.rows[low.bit_length() - 1]
                bits ^= low
            rows.append(acc)
        return F2Matrix(self.g, tuple(rows))

    def apply(self, v: F2Vector) -> F2Vector:
        if self.g != v.g:
            raise ValueError("size mismatch")
        bits = 0
        for i, row in enumerate(self.rows):
            bits |= ((row & v.bits).bit_count() & 1) << i
        return F2Vector(self.g, bits)

    def is_identity(self) -> bool:
        return self == F2Matrix.identity(self.g)

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "rows": [
                "".join("1" if r >> j & 1 else "0" for j in range(self.g))
                for r in self.rows
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "F2Matrix":
        g = int(data["g"])
        rows = []
        for s in data["rows"]:
            if len(s) != g or set(s) - {"0", "1"}:
                raise ValueError(f"bad row string {s!r}")
            rows.append(sum(1 << j for j, c in enumerate(s) if c == "1"))
        return cls(g, tuple(rows))


def is_orthogonal(m: F2Matrix) -> bool:
    """True iff the columns are orthonormal: M^T M = I."""
    return (m.transpose() * m).is_identity()


def twist_transvection(g: int, subset: Iterable[int]) -> F2Matrix:
    """Mod-2 action of the Dehn twist about a curve through the given
    crosscaps: x -> x + (x . v) v for v the subset's indicator vector.

    Orthogonality forces the subset to have even size.
    """
    s = tuple(sorted(set(subset)))
    if len(s) % 2 != 0 or not s:
        raise ValueError(f"twist subset must be nonempty of even size, got {s}")
    if not all(1 <= i <= g for i in s):
        raise ValueError(f"subset {s} outside 1..{g}")
    v = F2Vector.from_indices(g, s).bits
    rows = tuple((1 << i) ^ (v if v >> i & 1 else 0) for i in range(g))
    return F2Matrix(g, rows)


@functools.cache
def enumerate_o2(g: int) -> frozenset[F2Matrix]:
    """All of O_2(g) by depth-first extension of orthonormal frames."""
    if g > ENUMERATION_CAP:
        raise CapExceededError(
            f"frame enumeration capped at g <= {ENUMERATION_CAP}, got {g}"
        )
    odd = [v for v in range(1, 1 << g) if v.bit_count() % 2 == 1]
    found: list[F2Matrix] = []
    cols: list[int] = []

    def extend() -> None:
        if len(cols) == g:
            found.append(F2Matrix.from_columns(g, cols))
            return
        for v in odd:
            if all((v & c).bit_count() % 2 == 0 for c in cols):
                cols.append(v)
                extend()
                cols.pop()

    extend()
    return frozenset(found)


def standard_twist_generators(
    g: int, sizes: Iterable[int] = GENERATOR_SIZES
) -> dict[Subset, F2Matrix]:
    """Transvections of all index subsets of the given even sizes."""
    import itertools

    gens: dict[Subset, F2Matrix] = {}
    for size in sizes:
        if size % 2 != 0:
            raise ValueError(f"sizes must be even, got {size}")
        if size > g:
            continue
        for subset in itertools.combinations(range(1, g + 1), size):
            gens[subset] = twist_transvection(g, subset)
    return gens


def generate_group(g: int, gens: Iterable[F2Matrix]) -> frozenset[F2Matrix]:
    """Breadth-first closure of the generators; empty input gives {I}."""
    gens = sorted(set(gens))
    seen = {F2Matrix.identity(g)}
    frontier = sorted(seen)
    while frontier:
        new = []
        for a in frontier:
            for b in gens:
                c = a * b
                if c not in seen:
                    seen.add(c)
                    new.append(c)
        frontier = sorted(new)
    return frozenset(seen)


def word_table(
    g: int,
    gens: Mapping[Subset, F2Matrix],
    gen_filter: Callable[[Subset, F2Matrix], bool] | None = None,
) -> dict[F2Matrix, tuple[Subset, ...]]:
    """Canonical shortest word for every element the generators reach.

    Parents are dequeued in discovery order and generators tried in
    sorted label order, so each element's word is the lexicographically
    least among the shortest.  Involutive generators mean no inverse
    letters are ever needed.
    """
    items = sorted(
        (label, m)
        for label, m in gens.items()
        if gen_filter is None or gen_filter(label, m)
    )
    table: dict[F2Matrix, tuple[Subset, ...]] = {F2Matrix.identity(g): ()}
    frontier = [F2Matrix.identity(g)]
    while frontier:
        new = []
        for a in frontier:
            for label, b in items:
                c = a * b
                if c not in table:
                    table[c] = table[a] + (label,)
                    new.append(c)
        frontier = new
    return table


def express_as_word(
    target: F2Matrix,
    gens: Mapping[Subset, F2Matrix],
    gen_filter: Callable[[Subset, F2Matrix], bool] | None = None,
) -> tuple[Subset, ...]:
    """Canonical shortest word for the target, re-multiplied before return."""
    table = word_table(target.g, gens, gen_filter)
    if target not in table:
        raise NotInGroupError("target is outside the generated subgroup")
    w = table[target]
    check = F2Matrix.identity(target.g)
    for label in w:
        check = check * gens[label]
    if check != target:
        raise ArithmeticError("word table returned a word that does not multiply back")
    return w


def evaluate_word(g: int, gens: Mapping[Subset, F2Matrix], w: Iterable[Subset]) -> F2Matrix:
    acc = F2Matrix.identity(g)
    for label in w:
        acc = acc * gens[label]
    return acc


# ---------------------------------------------------------------------------
# stabilizer checks

CASE_ALPHA1 = "alpha1"
CASE_ALPHA12 = "alpha12"
CASE_ALPHA_ALL = "alpha_all"
STABILIZER_CASES = (CASE_ALPHA1, CASE_ALPHA12, CASE_ALPHA_ALL)

#: O_2 membership is verified against frame enumeration only up to the cap
CAVEAT_O2_SCALE = (
    "orthogonal-group checks run against exhaustive frame enumeration;"
    f" sizes beyond g={ENUMERATION_CAP} are out of verified range"
)


def _case_vector(g: int, case: str) -> F2Vector:
    if case == CASE_ALPHA1:
        return F2Vector.unit(g, 1)
    if case == CASE_ALPHA12:
        return F2Vector.from_indices(g, (1, 2))
    if case == CASE_ALPHA_ALL:
        return F2Vector(g, (1 << g) - 1)
    raise ValueError(f"unknown stabilizer case {case!r}, expected {STABILIZER_CASES}")


def _case_generators(g: int, case: str) -> dict[Subset, F2Matrix]:
    gens = standard_twist_generators(g)
    if case == CASE_ALPHA1:
        # subsets avoiding crosscap 1 fix its class
        return {s: m for s, m in gens.items() if min(s) >= 2}
    if case == CASE_ALPHA12:
        # the twist swapping classes 1 and 2, plus everything avoiding both
        keep = {s: m for s, m in gens.items() if min(s) >= 3}
        keep[(1, 2)] = gens[(1, 2)]
        return keep
    if case == CASE_ALPHA_ALL:
        # every even transvection fixes the all-ones class
        return gens
    raise ValueError(f"unknown stabilizer case {case!r}, expected {STABILIZER_CASES}")


def _alpha12_correction(g: int, a: F2Matrix) -> tuple[F2Matrix, list[str]]:
    """The transvection that moves A e1 back to a unit vector.

    Writes c1 = A e1 as e_i + sum of units with indices >= 3 (an even
    number of them, possibly zero); with T0 the transvection about
    {1, 2} union those extra indices, T0 A sends e1, e2 to units again.
    Returns T0 and a list of constraint violations (empty when the
    shape matches the construction).
    """
    problems: list[str] = []
    c1 = a.apply(F2Vector.unit(g, 1))
    idx = c1.indices()
    low = [i for i in idx if i <= 2]
    high = [i for i in idx if i >= 3]
    if len(low) != 1:
        # c1 has even overlap with {1, 2}: conjugating by the swap of
        # classes 1, 2 never fixes this, the construction needs exactly one
        problems.append(f"A e1 = {idx} does not meet {{1,2}} in one index")
        return F2Matrix.identity(g), problems
    if len(high) % 2 != 0:
        problems.append(f"A e1 = {idx} has odd overlap with 3..g")
        return F2Matrix.identity(g), problems
    if not high:
        return F2Matrix.identity(g), problems
    t0 = twist_transvection(g, (1, 2, *high))
    return t0, problems


def stabilizer_case_check(
    g: int,
    case: str,
    sample_count: int | None = None,
    seed: int = 0,
) -> CheckReport:
    """Every stabilizer element decomposes over the case's generators.

    For the class of one crosscap the permitted twists avoid it; for
    the sum of two classes a correcting transvection reduces to a block
    shape first; for the sum of all classes the full generating set is
    permitted and each generator is checked to fix the class.  With
    ``sample_count`` set, that many elements are drawn from the
    stabilizer with replacement using the seed; otherwise the check is
    exhaustive.
    """
    if g < 3:
        raise ValueError("stabilizer cases need g >= 3")
    if g > ENUMERATION_CAP - 1:
        raise CapExceededError(
            f"stabilizer checks enumerate O_2(g) and O_2(g-1); capped at"
            f" g <= {ENUMERATION_CAP - 1}"
        )
    v = _case_vector(g, case)
    group = sorted(enumerate_o2(g))
    stab = [a for a in group if a.apply(v) == v]
    gens = _case_generators(g, case)
    table = word_table(g, gens)

    rb = ReportBuilder(f"stabilizer:{case}", g=g)
    rb.caveat(CAVEAT_O2_SCALE)
    if case == CASE_ALPHA_ALL:
        for s, m in sorted(gens.items()):
            rb.record(m.apply(v) == v, f"generator {s} moves the all-ones class")

    if sample_count is None:
        chosen = stab
    else:
        rng = random.Random(seed)
        chosen = [stab[rng.randrange(len(stab))] for _ in range(sample_count)]
    rb.detail(f"stabilizer order {len(stab)}, elements checked {len(chosen)}")

    for a in chosen:
        label = f"element rows={a.rows}"
        if case == CASE_ALPHA12:
            t0, problems = _alpha12_correction(g, a)
            if problems:
                rb.record(False, f"{label}: {problems[0]}")
                continue
            b = t0 * a
            e1, e2 = F2Vector.unit(g, 1), F2Vector.unit(g, 2)
            c1, c2 = b.apply(e1), b.apply(e2)
            if {c1, c2} != {e1, e2}:
                rb.record(False, f"{label}: corrected matrix does not fix {{e1,e2}}")
                continue
            blocks_ok = all(
                not (b.rows[i] & 0b11) for i in range(2, g)
            ) and all(b.rows[i] >> 2 == 0 for i in range(2))
            if not blocks_ok:
                rb.record(False, f"{label}: corrected matrix is not block diagonal")
                continue
            target = b
        else:
            target = a
        # orthogonal matrices invert by transposition
        inv = target.transpose()
        if not (target * inv).is_identity():
            rb.record(False, f"{label}: transpose is not an inverse")
            continue
        if inv not in table:
            rb.record(False, f"{label}: not expressible over permitted twists")
            continue
        w = table[inv]
        product = evaluate_word(g, gens, w)
        ok = product == inv and (target * product).is_identity()
        rb.record(ok, f"{label}: word does not re-multiply to the inverse")
    return rb.build()
