"""
Exact scalar and matrix plumbing.

Scalars are ``fractions.Fraction``; matrices are ``sympy.ImmutableMatrix``
with ``sympy.Rational`` entries. Nothing in the engine ever touches floats.
"""

from fractions import Fraction
from math import isqrt
from numbers import Rational
from typing import Iterable, List, Optional, Sequence, Union

import sympy as sp

RationalLike = Union[int, Fraction, str, sp.Rational]


def to_fraction(value: RationalLike) -> Fraction:
    """
    Convert an exact rational input to a Fraction.

    Accepts ints, Fractions, sympy Rationals and strings such as "5/2" or "-3".
    Floats are rejected.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sp.Basic):
        if not value.is_Rational:
            raise TypeError(f"not an exact rational: {value!r}")
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"not an exact rational: {value!r}")


def to_sympy(value: RationalLike) -> sp.Rational:
    f = to_fraction(value)
    return sp.Rational(f.numerator, f.denominator)


def format_rational(value: RationalLike) -> str:
    """Serialize as "p/q" (or "p" for integers)."""
    return str(to_fraction(value))


def rational_sqrt(value: RationalLike) -> Optional[Fraction]:
    """Non-negative rational square root, or None if value is not a square in Q."""
    f = to_fraction(value)
    if f < 0:
        return None
    num, den = f.numerator, f.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def is_rational_square(value: RationalLike) -> bool:
    return rational_sqrt(value) is not None


# Matrices

def matrix(rows: Sequence[Sequence[RationalLike]]) -> sp.ImmutableMatrix:
    """Build an exact square matrix from nested rows."""
    data = [[to_sympy(x) for x in row] for row in rows]
    if not data or any(len(row) != len(data) for row in data):
        raise ValueError("matrix must be square and non-empty")
    return sp.ImmutableMatrix(data)


def diagonal(values: Iterable[RationalLike]) -> sp.ImmutableMatrix:
    values = [to_sympy(v) for v in values]
    if not values:
        raise ValueError("diagonal needs at least one entry")
    return sp.ImmutableMatrix(sp.diag(*values))


def identity(size: int) -> sp.ImmutableMatrix:
    return sp.ImmutableMatrix(sp.eye(size))


def format_matrix(m: sp.MatrixBase) -> List[List[str]]:
    return [[format_rational(m[i, j]) for j in range(m.cols)] for i in range(m.rows)]


def diagonal_entries(m: sp.MatrixBase) -> Optional[List[Fraction]]:
    """Diagonal of m if m is diagonal, else None."""
    if not m.is_diagonal():
        return None
    return [to_fraction(m[i, i]) for i in range(m.rows)]


def parse_matrix_literal(text: str) -> sp.ImmutableMatrix:
    """
    Parse the command-line matrix syntax: rows separated by ';',
    entries by ','.

    >>> parse_matrix_literal("2,0;0,3")
    Matrix([[2, 0], [0, 3]])
    """
    rows = [row for row in text.strip().split(';') if row.strip()]
    return matrix([[x for x in row.split(',')] for row in rows])


def parse_rational_list(text: str) -> List[Fraction]:
    return [to_fraction(x) for x in text.split(',') if x.strip()]
