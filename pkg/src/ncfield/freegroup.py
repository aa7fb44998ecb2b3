"""Truncated left regular representation of a free group, with dual operators.

Words of the free group on n generators are stored as tuples of nonzero
integers, +i for the generator g_i and -i for its inverse, always in reduced
form.  The ball of radius R (all reduced words of length at most R) carries
truncated versions of the left regular operators U_i = lambda(g_i) and of the
dual operators V_i, which act by right multiplication with g_i^{-1} on words
ending with g_i and by zero on all other words.

On interior basis vectors (words of length at most R-1, which cannot leave
the ball under a single U_i) the pair satisfies the exact commutator relation

    (U_i V_j - V_j U_i) delta_h = -delta_{ij} <delta_h, delta_e> delta_e.

Both sides vanish unless i = j and h = e, where U_iV_i kills delta_e while
V_iU_i returns it, so the sign on the right is forced.  Equivalently the
operators -V_1, ..., -V_n form a dual system for U_1, ..., U_n, which is the
finite-dimensional shadow of the criterion for maximal free entropy-like
defect of the generators.  Everything in this module runs in exact
arithmetic; there is no floating point anywhere, so a nonzero defect is a
genuine failure and not noise.

Note on one-sided inverses: U_i is injective on the interior, but V_i U_i is
not the identity there.  V_i U_i prepends g_i and then strips a trailing
g_i, which reproduces h only when prepending and appending agree, that is,
when h is a power of g_i (including the empty word).  Words that merely end
with g_i come back as a different word, and everything else dies.  The
honest one-sided identity pairs V_i with its adjoint (right multiplication
by g_i): V_i V_i* fixes every interior vector whose word does not end with
g_i^{-1}.  Both facts are exposed through ``vu_fixed_indices`` and checked
in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

from .errors import InputError
from .scalars import GaussianRational

Word = Tuple[int, ...]

# Refuse to materialize balls beyond this many words.
BALL_SIZE_GUARD = 10**6

_ONE = GaussianRational(1)


def ball_size(n: int, radius: int) -> int:
    """Number of reduced words of length <= radius over n free generators.

    Closed form 1 + sum_{k=1..R} 2n (2n-1)^(k-1): a reduced word extends by
    any of the 2n letters except the inverse of its last one.
    """
    if n < 1:
        raise InputError(f"need at least one generator, got n={n}")
    if radius < 0:
        raise InputError(f"ball radius must be nonnegative, got {radius}")
    total = 1
    shell = 2 * n
    for _ in range(radius):
        total += shell
        shell *= 2 * n - 1
    return total


def left_multiply(letter: int, word: Word) -> Word:
    """Reduced product g_letter * word (letter is +i or -i)."""
    if word and word[0] == -letter:
        return word[1:]
    return (letter,) + word


def right_multiply(word: Word, letter: int) -> Word:
    """Reduced product word * g_letter."""
    if word and word[-1] == -letter:
        return word[:-1]
    return word + (letter,)


def word_str(word: Word) -> str:
    """Human-readable form of a word, empty word rendered as 'e'."""
    if not word:
        return "e"
    return ".".join(f"g{v}" if v > 0 else f"g{-v}^-1" for v in word)


@dataclass(frozen=True)
class GroupBall:
    """All reduced words of length <= radius, in length-then-lex order.

    Letters are ordered g_1 < g_1^{-1} < g_2 < g_2^{-1} < ...; the empty
    word sits at index 0.  ``index`` maps each word back to its position.
    """

    n: int
    radius: int
    words: Tuple[Word, ...]
    index: Dict[Word, int] = field(compare=False)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def size(self) -> int:
        return len(self.words)

    def interior_indices(self) -> Tuple[int, ...]:
        """Indices of words of length <= radius - 1 (safe under one U_i)."""
        limit = self.radius - 1
        return tuple(k for k, w in enumerate(self.words) if len(w) <= limit)

    def contains(self, word: Word) -> bool:
        return word in self.index


def build_ball(n: int, radius: int) -> GroupBall:
    """Enumerate the ball of the given radius in canonical order."""
    if n < 1:
        raise InputError(f"need at least one generator, got n={n}")
    if radius < 1:
        raise InputError(f"ball radius must be at least 1, got {radius}")
    count = ball_size(n, radius)
    if count > BALL_SIZE_GUARD:
        raise InputError(
            f"ball of radius {radius} over {n} generators holds {count} "
            f"words, beyond the {BALL_SIZE_GUARD} limit"
        )
    letters: List[int] = []
    for i in range(1, n + 1):
        letters.extend((i, -i))
    words: List[Word] = [()]
    shell: List[Word] = [()]
    for _ in range(radius):
        grown: List[Word] = []
        for w in shell:
            last = w[-1] if w else 0
            for ltr in letters:
                if ltr != -last:
                    grown.append(w + (ltr,))
        words.extend(grown)
        shell = grown
    index = {w: k for k, w in enumerate(words)}
    return GroupBall(n=n, radius=radius, words=tuple(words), index=index)


@dataclass(frozen=True)
class SparseOp:
    """Finitely supported exact operator on the span of the ball's words.

    ``entries`` maps (row, col) to a nonzero Gaussian rational.  The two
    operator families built here are partial permutations, so every column
    holds at most one entry of value 1, but the arithmetic below does not
    rely on that.
    """

    dim: int
    entries: Dict[Tuple[int, int], GaussianRational] = field(compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseOp):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def apply_basis(self, col: int) -> Dict[int, GaussianRational]:
        """Image of the basis vector delta_col as a sparse column."""
        out: Dict[int, GaussianRational] = {}
        for (r, c), val in self.entries.items():
            if c == col:
                out[r] = out.get(r, GaussianRational(0)) + val
        return {r: v for r, v in out.items() if not v.is_zero()}

    def apply(self, vec: Dict[int, GaussianRational]) -> Dict[int, GaussianRational]:
        """Apply to a sparse vector (index -> coefficient)."""
        out: Dict[int, GaussianRational] = {}
        for (r, c), val in self.entries.items():
            coeff = vec.get(c)
            if coeff is not None:
                out[r] = out.get(r, GaussianRational(0)) + val * coeff
        return {r: v for r, v in out.items() if not v.is_zero()}

    def adjoint(self) -> "SparseOp":
        flipped = {(c, r): val.conjugate() for (r, c), val in self.entries.items()}
        return SparseOp(dim=self.dim, entries=flipped)

    def compose(self, other: "SparseOp") -> "SparseOp":
        """self after other, as a sparse product."""
        if self.dim != other.dim:
            raise InputError("operator dimensions differ")
        by_col: Dict[int, List[Tuple[int, GaussianRational]]] = {}
        for (r, c), val in self.entries.items():
            by_col.setdefault(c, []).append((r, val))
        product: Dict[Tuple[int, int], GaussianRational] = {}
        for (mid, col), val in other.entries.items():
            for row, lead in by_col.get(mid, ()):
                key = (row, col)
                acc = product.get(key, GaussianRational(0)) + lead * val
                if acc.is_zero():
                    product.pop(key, None)
                else:
                    product[key] = acc
        return SparseOp(dim=self.dim, entries=product)

    def column_support(self) -> Dict[int, int]:
        """Number of nonzero entries per column (for structure checks)."""
        counts: Dict[int, int] = {}
        for (_, c) in self.entries:
            counts[c] = counts.get(c, 0) + 1
        return counts


def left_regular(i: int, ball: GroupBall) -> SparseOp:
    """Truncation of U_i = lambda(g_i): delta_h -> delta_{g_i h}.

    Images that would leave the ball are dropped, which is exactly why the
    commutator identity is only asserted on interior vectors.
    """
    _check_generator(i, ball)
    entries: Dict[Tuple[int, int], GaussianRational] = {}
    for col, word in enumerate(ball.words):
        image = left_multiply(i, word)
        row = ball.index.get(image)
        if row is not None:
            entries[(row, col)] = _ONE
    return SparseOp(dim=ball.size, entries=entries)


def dual_op(i: int, ball: GroupBall) -> SparseOp:
    """The dual operator V_i: delta_h -> delta_{h g_i^{-1}} if h ends with g_i.

    Words not ending with g_i (including the empty word) are sent to zero.
    Right multiplication by g_i^{-1} shortens the word, so the image always
    stays inside the ball.
    """
    _check_generator(i, ball)
    entries: Dict[Tuple[int, int], GaussianRational] = {}
    for col, word in enumerate(ball.words):
        if word and word[-1] == i:
            entries[(ball.index[word[:-1]], col)] = _ONE
    return SparseOp(dim=ball.size, entries=entries)


def _check_generator(i: int, ball: GroupBall) -> None:
    if not 1 <= i <= ball.n:
        raise InputError(f"generator index {i} outside 1..{ball.n}")


def commutator_defect(i: int, j: int, ball: GroupBall) -> Tuple[Fraction, bool]:
    """Exact check of (U_i V_j - V_j U_i) delta_h = -delta_ij <delta_h, delta_e> delta_e.

    The identity is evaluated on every interior basis vector (word length
    <= radius - 1).  Both sides are zero except at i = j and h = e, where
    U_iV_i delta_e = 0 while V_iU_i delta_e = delta_e, so the commutator
    acts as minus the projection onto delta_e.  Returns the largest defect,
    measured entrywise as |re| + |im| of the difference, together with a
    pass flag.  Exact arithmetic means a passing run reports a defect of
    exactly 0.
    """
    _check_generator(i, ball)
    _check_generator(j, ball)
    u_op = left_regular(i, ball)
    v_op = dual_op(j, ball)
    worst = Fraction(0)
    for h in ball.interior_indices():
        vec = {h: _ONE}
        forward = u_op.apply(v_op.apply(vec))
        backward = v_op.apply(u_op.apply(vec))
        diff: Dict[int, GaussianRational] = dict(forward)
        for idx, val in backward.items():
            diff[idx] = diff.get(idx, GaussianRational(0)) - val
        if i == j and h == 0:
            diff[0] = diff.get(0, GaussianRational(0)) + _ONE
        for val in diff.values():
            size = abs(val.re) + abs(val.im)
            if size > worst:
                worst = size
    return worst, worst == 0


def vu_fixed_indices(i: int, ball: GroupBall) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Interior indices fixed by V_i U_i and by V_i V_i*, respectively.

    V_i U_i delta_h is delta_{g_i h} with a trailing g_i stripped, so the
    fixed words are exactly the powers of g_i, the empty word included.
    The second tuple holds the interior words not ending with g_i^{-1},
    which V_i V_i* fixes because the adjoint of V_i acts by right
    multiplication with g_i on exactly those words.
    """
    _check_generator(i, ball)
    vu_fixed: List[int] = []
    vvstar_fixed: List[int] = []
    for h in ball.interior_indices():
        word = ball.words[h]
        if all(v == i for v in word):
            vu_fixed.append(h)
        if not word or word[-1] != -i:
            vvstar_fixed.append(h)
    return tuple(vu_fixed), tuple(vvstar_fixed)


def dual_system_report(n: int, radius: int) -> dict:
    """Run all (i, j) commutator checks and package the results."""
    ball = build_ball(n, radius)
    pairs = []
    all_pass = True
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            defect, ok = commutator_defect(i, j, ball)
            all_pass = all_pass and ok
            pairs.append(
                {"i": i, "j": j, "defect": str(defect), "pass": ok}
            )
    return {
        "n": n,
        "R": radius,
        "ball_size": ball.size,
        "interior_count": len(ball.interior_indices()),
        "pairs": pairs,
        "all_pass": all_pass,
    }
