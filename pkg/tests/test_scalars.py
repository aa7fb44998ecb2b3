"""Exact scalar arithmetic: field axioms, parsing, snapping, exact rank."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from ncfield import GaussianRational
from ncfield.errors import InputError
from ncfield.scalars import I, ONE, ZERO, rank_exact, snap_to_gaussian_rational


def _random_scalar(rng: random.Random) -> GaussianRational:
    def frac() -> Fraction:
        return Fraction(rng.randint(-6, 6), rng.randint(1, 5))

    return GaussianRational(frac(), frac())


def test_constants():
    assert ZERO.is_zero()
    assert ONE == GaussianRational(1)
    assert I * I == GaussianRational(-1)


def test_field_axioms_random():
    rng = random.Random(20240814)
    for _ in range(60):
        a = _random_scalar(rng)
        b = _random_scalar(rng)
        c = _random_scalar(rng)
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a
        assert a * b == b * a
        assert a + ZERO == a
        assert a * ONE == a
        assert a - a == ZERO
        if not a.is_zero():
            assert a * a.inverse() == ONE


def test_conjugation_is_an_involution():
    rng = random.Random(7)
    for _ in range(30):
        a = _random_scalar(rng)
        b = _random_scalar(rng)
        assert a.conjugate().conjugate() == a
        assert (a * b).conjugate() == a.conjugate() * b.conjugate()
        assert (a + b).conjugate() == a.conjugate() + b.conjugate()
        norm = a * a.conjugate()
        assert norm.im == 0
        assert norm.re >= 0


def test_from_string_round_trip():
    cases = ["0", "1", "-1", "i", "-i", "3/2", "-5/7", "1+i", "3/2-1/3i", "2i", "-2/3i"]
    for text in cases:
        value = GaussianRational.from_string(text)
        again = GaussianRational.from_string(str(value))
        assert again == value, text


def test_from_string_values():
    assert GaussianRational.from_string("3/2-1/3i") == GaussianRational(
        Fraction(3, 2), Fraction(-1, 3)
    )
    assert GaussianRational.from_string("i") == I
    assert GaussianRational.from_string("-7") == GaussianRational(-7)


@pytest.mark.parametrize("bad", ["", "x", "1+", "i1", "3/2-1/3j", "1 + 2", "//2"])
def test_from_string_rejects_junk(bad):
    with pytest.raises(ValueError):
        GaussianRational.from_string(bad)


def test_division_by_zero_raises():
    with pytest.raises((ZeroDivisionError, InputError)):
        ZERO.inverse()


def test_complex_round_trip():
    value = GaussianRational(Fraction(3, 2), Fraction(-1, 3))
    z = complex(value)
    assert z == complex(1.5, -1 / 3)


def test_snap_recovers_small_rationals():
    assert snap_to_gaussian_rational(0.5 + 1e-9) == GaussianRational(Fraction(1, 2))
    snapped = snap_to_gaussian_rational(complex(2 / 3, -1 / 4))
    assert snapped == GaussianRational(Fraction(2, 3), Fraction(-1, 4))
    assert snap_to_gaussian_rational(0.1234567, tol=1e-9) is None


def test_rank_exact_known_cases():
    assert rank_exact([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]) == 1
    assert rank_exact([[ONE, ZERO], [ZERO, ONE]]) == 2
    assert rank_exact([[ZERO, ZERO], [ZERO, ZERO]]) == 0
    # i * first row equals second row, so the rank drops.
    rows = [[ONE, I], [I, GaussianRational(-1)]]
    assert rank_exact(rows) == 1


def test_rank_exact_matches_float_rank_on_random_integer_matrices():
    import numpy as np

    rng = random.Random(99)
    for trial in range(20):
        n = rng.randint(1, 5)
        m = rng.randint(1, 5)
        r = rng.randint(0, min(n, m))
        left = [[Fraction(rng.randint(-3, 3)) for _ in range(r)] for _ in range(n)]
        right = [[Fraction(rng.randint(-3, 3)) for _ in range(m)] for _ in range(r)]
        prod = [
            [sum((left[i][k] * right[k][j] for k in range(r)), Fraction(0)) for j in range(m)]
            for i in range(n)
        ]
        exact = rank_exact([[GaussianRational(v) for v in row] for row in prod])
        floats = np.array([[float(v) for v in row] for row in prod])
        assert exact == np.linalg.matrix_rank(floats), f"trial {trial}"
        assert exact <= r
