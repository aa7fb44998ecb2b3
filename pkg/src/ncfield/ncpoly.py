"""Noncommutative polynomials, matrices over them, and linear pencils.

A polynomial in the free algebra over x1..xn (and their formal adjoints) is
stored as a map from words to exact scalars; the zero polynomial is the empty
map.  A word is a tuple of letters, a letter is (variable index, star flag).
Words are ordered by length first and then lexicographically, which fixes a
canonical text form such as ``(3/2+1/2i)*x1*x2* + 1``.

A linear pencil A0 + A1*x1 + ... holds one exact coefficient matrix per
letter.  Pencils may live over the plain alphabet x1..xn or over the doubled
alphabet x1..xn, x1*..xn*; the doubled form is what linear representations of
rational expressions use.  Evaluation substitutes concrete matrices for the
letters, sends scalars to multiples of the identity, and returns a complex
numpy block matrix.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegreeTooHigh,
    NonSquareError,
    ShapeMismatch,
    StarredLetterError,
    VariableMismatch,
)
from .scalars import GaussianRational, Scalarish


class Letter(NamedTuple):
    index: int
    star: bool = False

    def adjoint(self) -> "Letter":
        return Letter(self.index, not self.star)

    def render(self) -> str:
        return f"x{self.index}" + ("*" if self.star else "")


Word = Tuple[Letter, ...]

EMPTY_WORD: Word = ()


def word_key(word: Word):
    """Sort key for the graded lexicographic order."""
    return (len(word), word)


def word_adjoint(word: Word) -> Word:
    return tuple(letter.adjoint() for letter in reversed(word))


class NcPoly:
    """Polynomial in noncommuting variables with exact coefficients."""

    __slots__ = ("n_vars", "_terms")

    def __init__(self, terms: Dict[Word, Scalarish], n_vars: int):
        if n_vars < 0:
            raise ValueError("n_vars must be nonnegative")
        clean: Dict[Word, GaussianRational] = {}
        for word, coeff in terms.items():
            c = GaussianRational.coerce(coeff)
            if c.is_zero():
                continue
            for letter in word:
                if not 1 <= letter.index <= n_vars:
                    raise VariableMismatch(
                        f"letter x{letter.index} outside 1..{n_vars}"
                    )
            clean[tuple(word)] = c
        self.n_vars = n_vars
        self._terms = clean

    # constructors

    @classmethod
    def zero(cls, n_vars: int) -> "NcPoly":
        return cls({}, n_vars)

    @classmethod
    def one(cls, n_vars: int) -> "NcPoly":
        return cls({EMPTY_WORD: GaussianRational(1)}, n_vars)

    @classmethod
    def const(cls, value: Scalarish, n_vars: int) -> "NcPoly":
        return cls({EMPTY_WORD: GaussianRational.coerce(value)}, n_vars)

    @classmethod
    def var(cls, index: int, n_vars: int, star: bool = False) -> "NcPoly":
        return cls({(Letter(index, star),): GaussianRational(1)}, n_vars)

    @classmethod
    def monomial(cls, word: Word, coeff: Scalarish, n_vars: int) -> "NcPoly":
        return cls({tuple(word): GaussianRational.coerce(coeff)}, n_vars)

    # inspection

    def terms(self) -> List[Tuple[Word, GaussianRational]]:
        """Terms sorted by descending degree, then lexicographically."""
        return sorted(self._terms.items(), key=lambda kv: (-len(kv[0]), kv[0]))

    def widen(self, n_vars: int) -> "NcPoly":
        """The same polynomial viewed over a larger variable set."""
        if n_vars < self.n_vars:
            raise VariableMismatch(
                f"cannot narrow from {self.n_vars} to {n_vars} variables"
            )
        if n_vars == self.n_vars:
            return self
        return NcPoly(dict(self._terms), n_vars)

    def coefficient(self, word: Word) -> GaussianRational:
        return self._terms.get(tuple(word), GaussianRational(0))

    @property
    def degree(self) -> int:
        """Degree of the polynomial; the zero polynomial has degree -1."""
        if not self._terms:
            return -1
        return max(len(w) for w in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def has_star(self) -> bool:
        return any(letter.star for word in self._terms for letter in word)

    def constant_term(self) -> GaussianRational:
        return self.coefficient(EMPTY_WORD)

    # arithmetic

    def _check_vars(self, other: "NcPoly"):
        if self.n_vars != other.n_vars:
            raise VariableMismatch(
                f"operands over {self.n_vars} and {other.n_vars} variables"
            )

    def __add__(self, other) -> "NcPoly":
        other = self._coerce_operand(other)
        self._check_vars(other)
        terms = dict(self._terms)
        for word, coeff in other._terms.items():
            acc = terms.get(word, GaussianRational(0)) + coeff
            if acc.is_zero():
                terms.pop(word, None)
            else:
                terms[word] = acc
        return NcPoly(terms, self.n_vars)

    __radd__ = __add__

    def __sub__(self, other) -> "NcPoly":
        return self + (-self._coerce_operand(other))

    def __rsub__(self, other) -> "NcPoly":
        return self._coerce_operand(other) - self

    def __neg__(self) -> "NcPoly":
        return NcPoly({w: -c for w, c in self._terms.items()}, self.n_vars)

    def __mul__(self, other) -> "NcPoly":
        if isinstance(other, (int, Fraction, GaussianRational)):
            c = GaussianRational.coerce(other)
            return NcPoly({w: k * c for w, k in self._terms.items()}, self.n_vars)
        other = self._coerce_operand(other)
        self._check_vars(other)
        terms: Dict[Word, GaussianRational] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                word = w1 + w2
                acc = terms.get(word, GaussianRational(0)) + c1 * c2
                if acc.is_zero():
                    terms.pop(word, None)
                else:
                    terms[word] = acc
        return NcPoly(terms, self.n_vars)

    def __rmul__(self, other) -> "NcPoly":
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self * other
        return self._coerce_operand(other) * self

    def _coerce_operand(self, other) -> "NcPoly":
        if isinstance(other, NcPoly):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return NcPoly.const(other, self.n_vars)
        raise TypeError(f"cannot combine NcPoly with {type(other).__name__}")

    def adjoint(self) -> "NcPoly":
        """Conjugate coefficients, reverse words, star every letter."""
        return NcPoly(
            {word_adjoint(w): c.conjugate() for w, c in self._terms.items()},
            self.n_vars,
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = NcPoly.const(other, self.n_vars)
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self.n_vars == other.n_vars and self._terms == other._terms

    def __hash__(self):
        return hash((self.n_vars, frozenset(self._terms.items())))

    # text form

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        chunks: List[str] = []
        for word, coeff in self.terms():
            negative = coeff.re < 0 or (coeff.re == 0 and coeff.im < 0)
            c = -coeff if negative else coeff
            letters = "*".join(letter.render() for letter in word)
            if not word:
                body = _render_scalar_factor(c, standalone=True)
            elif c == 1:
                body = letters
            else:
                body = _render_scalar_factor(c) + "*" + letters
            if not chunks:
                chunks.append("-" + body if negative else body)
            else:
                chunks.append(("- " if negative else "+ ") + body)
        return " ".join(chunks)

    def __repr__(self) -> str:
        return f"NcPoly({str(self)!r}, n_vars={self.n_vars})"

    # evaluation

    def evaluate(self, model, cache: Optional[dict] = None) -> np.ndarray:
        """Value at a tuple of matrices; scalars become multiples of identity."""
        d = model.d
        if cache is None:
            cache = {}
        out = np.zeros((d, d), dtype=complex)
        for word, coeff in self._terms.items():
            out += complex(coeff) * _word_value(word, model, cache)
        return out


def _render_scalar_factor(c: GaussianRational, standalone: bool = False) -> str:
    text = str(c)
    if c.im != 0 and c.re != 0:
        return f"({text})"
    if standalone:
        return text
    return text


def _word_value(word: Word, model, cache: dict) -> np.ndarray:
    if word in cache:
        return cache[word]
    if not word:
        value = np.eye(model.d, dtype=complex)
    else:
        value = _word_value(word[:-1], model, cache) @ model.letter_value(word[-1])
    cache[word] = value
    return value


class NcMatrix:
    """Rectangular matrix with NcPoly entries."""

    __slots__ = ("rows", "cols", "n_vars", "entries")

    def __init__(self, entries: Sequence[Sequence[NcPoly]], n_vars: Optional[int] = None):
        rows = len(entries)
        if rows == 0:
            raise ValueError("matrix needs at least one row")
        cols = len(entries[0])
        if any(len(r) != cols for r in entries):
            raise ShapeMismatch("ragged rows")
        if n_vars is None:
            n_vars = max(
                (p.n_vars for row in entries for p in row if isinstance(p, NcPoly)),
                default=0,
            )
        grid = []
        for row in entries:
            new_row = []
            for p in row:
                if not isinstance(p, NcPoly):
                    p = NcPoly.const(p, n_vars)
                new_row.append(p.widen(n_vars))
            grid.append(tuple(new_row))
        self.rows = rows
        self.cols = cols
        self.n_vars = n_vars
        self.entries = tuple(grid)

    # constructors

    @classmethod
    def zero(cls, rows: int, cols: int, n_vars: int) -> "NcMatrix":
        z = NcPoly.zero(n_vars)
        return cls([[z] * cols for _ in range(rows)], n_vars)

    @classmethod
    def identity(cls, size: int, n_vars: int) -> "NcMatrix":
        one = NcPoly.one(n_vars)
        z = NcPoly.zero(n_vars)
        return cls(
            [[one if i == j else z for j in range(size)] for i in range(size)],
            n_vars,
        )

    @classmethod
    def from_scalars(cls, rows: Sequence[Sequence[Scalarish]], n_vars: int) -> "NcMatrix":
        return cls(
            [[NcPoly.const(x, n_vars) for x in row] for row in rows], n_vars
        )

    @classmethod
    def diag(cls, polys: Sequence[NcPoly]) -> "NcMatrix":
        n_vars = max(p.n_vars for p in polys)
        z = NcPoly.zero(n_vars)
        size = len(polys)
        return cls(
            [[polys[i] if i == j else z for j in range(size)] for i in range(size)],
            n_vars,
        )

    def __getitem__(self, key) -> NcPoly:
        i, j = key
        return self.entries[i][j]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def degree(self) -> int:
        return max(p.degree for row in self.entries for p in row)

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def has_star(self) -> bool:
        return any(p.has_star() for row in self.entries for p in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # arithmetic

    def __add__(self, other: "NcMatrix") -> "NcMatrix":
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} + {other.shape}")
        return NcMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
            self.n_vars,
        )

    def __sub__(self, other: "NcMatrix") -> "NcMatrix":
        return self + (-other)

    def __neg__(self) -> "NcMatrix":
        return NcMatrix(
            [[-p for p in row] for row in self.entries], self.n_vars
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, NcPoly)):
            return NcMatrix(
                [[p * other for p in row] for row in self.entries], self.n_vars
            )
        if not isinstance(other, NcMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.shape} @ {other.shape}")
        out = []
        for i in range(self.rows):
            out_row = []
            for j in range(other.cols):
                acc = NcPoly.zero(self.n_vars)
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                out_row.append(acc)
            out.append(out_row)
        return NcMatrix(out, self.n_vars)

    __matmul__ = __mul__

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, NcPoly)):
            return NcMatrix(
                [[other * p for p in row] for row in self.entries], self.n_vars
            )
        return NotImplemented

    def adjoint(self) -> "NcMatrix":
        return NcMatrix(
            [
                [self.entries[j][i].adjoint() for j in range(self.rows)]
                for i in range(self.cols)
            ],
            self.n_vars,
        )

    def shift(self, lam: Scalarish) -> "NcMatrix":
        """Subtract lam times the identity."""
        if not self.is_square():
            raise NonSquareError("shift needs a square matrix")
        lam = GaussianRational.coerce(lam)
        out = [list(row) for row in self.entries]
        for i in range(self.rows):
            out[i][i] = out[i][i] - NcPoly.const(lam, self.n_vars)
        return NcMatrix(out, self.n_vars)

    def direct_sum(self, other: "NcMatrix") -> "NcMatrix":
        if self.n_vars != other.n_vars:
            raise VariableMismatch("direct sum across variable counts")
        z = NcPoly.zero(self.n_vars)
        top = [list(row) + [z] * other.cols for row in self.entries]
        bottom = [[z] * self.cols + list(row) for row in other.entries]
        return NcMatrix(top + bottom, self.n_vars)

    def pad_to_square(self) -> "NcMatrix":
        """Pad with zero rows or columns; inner rank is unchanged."""
        if self.rows == self.cols:
            return self
        size = max(self.rows, self.cols)
        z = NcPoly.zero(self.n_vars)
        grid = [list(row) + [z] * (size - self.cols) for row in self.entries]
        for _ in range(size - self.rows):
            grid.append([z] * size)
        return NcMatrix(grid, self.n_vars)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NcMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.n_vars == other.n_vars
            and self.entries == other.entries
        )

    def __str__(self) -> str:
        return "[" + "; ".join(
            ", ".join(str(p) for p in row) for row in self.entries
        ) + "]"

    def __repr__(self) -> str:
        return f"NcMatrix({self.rows}x{self.cols}, n_vars={self.n_vars})"

    # evaluation and structure

    def evaluate(self, model, shift: complex = 0) -> np.ndarray:
        """Block evaluation at a matrix tuple, optionally minus shift*identity."""
        d = model.d
        cache: dict = {}
        out = np.zeros((self.rows * d, self.cols * d), dtype=complex)
        for i in range(self.rows):
            for j in range(self.cols):
                p = self.entries[i][j]
                if p.is_zero():
                    continue
                out[i * d : (i + 1) * d, j * d : (j + 1) * d] = p.evaluate(model, cache)
        if shift != 0:
            if self.rows != self.cols:
                raise NonSquareError("shift needs a square matrix")
            out -= shift * np.eye(self.rows * d, dtype=complex)
        return out

    def hollow_block(self) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """Find a zero submatrix with more than N rows plus columns.

        Returns 1-based (row indices, column indices) or None.  Existence is
        decided through a maximum matching on the nonzero pattern: the pattern
        admits a perfect matching exactly when no such block exists.
        """
        if not self.is_square():
            raise NonSquareError("hollow structure is defined for square matrices")
        n = self.rows
        adj = [
            [j for j in range(n) if not self.entries[i][j].is_zero()]
            for i in range(n)
        ]
        match_row, match_col, size = _max_bipartite_matching(n, adj)
        if size == n:
            return None
        rows_cover, cols_cover = _koenig_cover(n, adj, match_row, match_col)
        zero_rows = tuple(i + 1 for i in range(n) if i not in rows_cover)
        zero_cols = tuple(j + 1 for j in range(n) if j not in cols_cover)
        return (zero_rows, zero_cols)

    def to_pencil(self) -> "LinearPencil":
        """Coefficient extraction for matrices of degree at most one."""
        if self.has_star():
            raise StarredLetterError("pencil extraction needs a star-free matrix")
        if self.degree > 1:
            raise DegreeTooHigh(f"degree {self.degree} matrix is not a pencil")
        n = self.n_vars
        zero = GaussianRational(0)
        coeffs = [
            [[zero for _ in range(self.cols)] for _ in range(self.rows)]
            for _ in range(n + 1)
        ]
        for i in range(self.rows):
            for j in range(self.cols):
                for word, c in self.entries[i][j].terms():
                    if len(word) == 0:
                        coeffs[0][i][j] = c
                    else:
                        coeffs[word[0].index][i][j] = c
        return LinearPencil(
            [tuple(map(tuple, m)) for m in coeffs], n, star_letters=False
        )


def _max_bipartite_matching(n: int, adj: List[List[int]]):
    """Augmenting-path maximum matching of rows to columns."""
    match_row = [-1] * n
    match_col = [-1] * n

    def try_augment(i: int, seen: List[bool]) -> bool:
        for j in adj[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match_col[j] == -1 or try_augment(match_col[j], seen):
                match_row[i] = j
                match_col[j] = i
                return True
        return False

    size = 0
    for i in range(n):
        if try_augment(i, [False] * n):
            size += 1
    return match_row, match_col, size


def _koenig_cover(n: int, adj: List[List[int]], match_row, match_col):
    """Minimum vertex cover from a maximum matching.

    Alternating BFS from unmatched rows; the cover is unvisited rows plus
    visited columns, and its complement spans a zero block.
    """
    visited_rows = set(i for i in range(n) if match_row[i] == -1)
    visited_cols: set = set()
    queue = list(visited_rows)
    while queue:
        i = queue.pop()
        for j in adj[i]:
            if j in visited_cols:
                continue
            visited_cols.add(j)
            k = match_col[j]
            if k != -1 and k not in visited_rows:
                visited_rows.add(k)
                queue.append(k)
    rows_cover = set(range(n)) - visited_rows
    cols_cover = visited_cols
    return rows_cover, cols_cover


class LinearPencil:
    """A0 + sum of Ai*xi with exact coefficient matrices.

    With ``star_letters`` set, the alphabet is doubled and the coefficient
    list is A0, A1..An for x1..xn, then B1..Bn for x1*..xn*.
    """

    __slots__ = ("coeffs", "rows", "cols", "n_vars", "star_letters")

    def __init__(self, coeffs: Sequence, n_vars: int, star_letters: bool = False):
        expected = 1 + (2 * n_vars if star_letters else n_vars)
        if len(coeffs) != expected:
            raise VariableMismatch(
                f"expected {expected} coefficient matrices, got {len(coeffs)}"
            )
        frozen = []
        rows = len(coeffs[0])
        cols = len(coeffs[0][0]) if rows else 0
        for mat in coeffs:
            if len(mat) != rows or any(len(r) != cols for r in mat):
                raise ShapeMismatch("coefficient matrices differ in shape")
            frozen.append(
                tuple(tuple(GaussianRational.coerce(x) for x in row) for row in mat)
            )
        self.coeffs = tuple(frozen)
        self.rows = rows
        self.cols = cols
        self.n_vars = n_vars
        self.star_letters = star_letters

    @property
    def n_letters(self) -> int:
        return 2 * self.n_vars if self.star_letters else self.n_vars

    def letter(self, pos: int) -> Letter:
        """Letter for coefficient slot pos (1-based; 0 is the constant)."""
        if pos <= self.n_vars:
            return Letter(pos, False)
        return Letter(pos - self.n_vars, True)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_homogeneous(self) -> bool:
        return all(x.is_zero() for row in self.coeffs[0] for x in row)

    def is_zero(self) -> bool:
        return all(
            x.is_zero() for mat in self.coeffs for row in mat for x in row
        )

    def numeric_coeffs(self) -> List[np.ndarray]:
        return [
            np.array([[complex(x) for x in row] for row in mat], dtype=complex)
            for mat in self.coeffs
        ]

    def to_matrix(self) -> NcMatrix:
        n = self.n_vars
        grid = []
        for i in range(self.rows):
            row = []
            for j in range(self.cols):
                terms: Dict[Word, GaussianRational] = {}
                c0 = self.coeffs[0][i][j]
                if not c0.is_zero():
                    terms[EMPTY_WORD] = c0
                for pos in range(1, self.n_letters + 1):
                    c = self.coeffs[pos][i][j]
                    if not c.is_zero():
                        terms[(self.letter(pos),)] = c
                row.append(NcPoly(terms, n))
            grid.append(row)
        return NcMatrix(grid, n)

    def adjoint(self) -> "LinearPencil":
        """Entrywise adjoint; x and x* coefficient roles swap."""
        def conj_t(mat):
            return tuple(
                tuple(mat[j][i].conjugate() for j in range(len(mat)))
                for i in range(len(mat[0]))
            )

        if not self.star_letters:
            widened = self.widen_alphabet()
            return widened.adjoint()
        n = self.n_vars
        out = [conj_t(self.coeffs[0])]
        out.extend(conj_t(self.coeffs[n + i]) for i in range(1, n + 1))
        out.extend(conj_t(self.coeffs[i]) for i in range(1, n + 1))
        return LinearPencil(out, n, star_letters=True)

    def widen_alphabet(self) -> "LinearPencil":
        """Reissue over the doubled alphabet with zero starred coefficients."""
        if self.star_letters:
            return self
        zero = tuple(
            tuple(GaussianRational(0) for _ in range(self.cols))
            for _ in range(self.rows)
        )
        return LinearPencil(
            list(self.coeffs) + [zero] * self.n_vars,
            self.n_vars,
            star_letters=True,
        )

    def homogeneous_part(self) -> "LinearPencil":
        zero = tuple(
            tuple(GaussianRational(0) for _ in range(self.cols))
            for _ in range(self.rows)
        )
        return LinearPencil(
            [zero] + list(self.coeffs[1:]), self.n_vars, self.star_letters
        )

    def direct_sum(self, other: "LinearPencil") -> "LinearPencil":
        if self.n_vars != other.n_vars or self.star_letters != other.star_letters:
            raise VariableMismatch("pencil alphabets differ")
        out = []
        for a, b in zip(self.coeffs, other.coeffs):
            top = [tuple(row) + tuple(GaussianRational(0) for _ in range(other.cols)) for row in a]
            bot = [tuple(GaussianRational(0) for _ in range(self.cols)) + tuple(row) for row in b]
            out.append(tuple(top + bot))
        return LinearPencil(out, self.n_vars, self.star_letters)

    def evaluate(self, model, shift: complex = 0) -> np.ndarray:
        """Kronecker evaluation at a matrix tuple."""
        d = model.d
        mats = self.numeric_coeffs()
        out = np.kron(mats[0], np.eye(d, dtype=complex))
        for pos in range(1, self.n_letters + 1):
            if not mats[pos].any():
                continue
            out += np.kron(mats[pos], model.letter_value(self.letter(pos)))
        if shift != 0:
            out -= shift * np.eye(out.shape[0], dtype=complex)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearPencil):
            return NotImplemented
        return (
            self.n_vars == other.n_vars
            and self.star_letters == other.star_letters
            and self.coeffs == other.coeffs
        )

    def __repr__(self) -> str:
        kind = "doubled" if self.star_letters else "plain"
        return (
            f"LinearPencil({self.rows}x{self.cols}, n_vars={self.n_vars}, {kind})"
        )


def random_pencil(
    n_vars: int,
    size: int,
    seed: int,
    homogeneous: bool = False,
    coeff_range: int = 2,
    density: float = 0.75,
    complex_coeffs: bool = False,
) -> LinearPencil:
    """Seeded random square pencil with small integer coefficients."""
    rng = random.Random(seed)

    def scalar() -> GaussianRational:
        if rng.random() > density:
            return GaussianRational(0)
        re = rng.randint(-coeff_range, coeff_range)
        im = rng.randint(-coeff_range, coeff_range) if complex_coeffs else 0
        return GaussianRational(re, im)

    def mat():
        return tuple(
            tuple(scalar() for _ in range(size)) for _ in range(size)
        )

    zero = tuple(
        tuple(GaussianRational(0) for _ in range(size)) for _ in range(size)
    )
    coeffs = [zero if homogeneous else mat()]
    coeffs.extend(mat() for _ in range(n_vars))
    return LinearPencil(coeffs, n_vars)


def random_poly_matrix(
    n_vars: int,
    rows: int,
    cols: int,
    degree: int,
    seed: int,
    terms_per_entry: int = 3,
    coeff_range: int = 2,
    allow_star: bool = False,
    complex_coeffs: bool = False,
) -> NcMatrix:
    """Seeded random polynomial matrix with small integer coefficients."""
    rng = random.Random(seed)

    def letter() -> Letter:
        star = allow_star and rng.random() < 0.5
        return Letter(rng.randint(1, n_vars), star)

    def poly() -> NcPoly:
        terms: Dict[Word, GaussianRational] = {}
        for _ in range(rng.randint(1, max(1, terms_per_entry))):
            deg = rng.randint(0, degree)
            word = tuple(letter() for _ in range(deg))
            re = rng.randint(-coeff_range, coeff_range)
            im = rng.randint(-coeff_range, coeff_range) if complex_coeffs else 0
            coeff = GaussianRational(re, im)
            if coeff.is_zero():
                continue
            terms[word] = terms.get(word, GaussianRational(0)) + coeff
        return NcPoly(terms, n_vars)

    grid = [[poly() for _ in range(cols)] for _ in range(rows)]
    return NcMatrix(grid, n_vars)
