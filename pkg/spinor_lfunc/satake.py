"""
Satake parameters of unramified principal series in the dual groups
GL_m(C), GSp_2n(C) and GSO_2n(C), and of the quasi-split GSpin_2n^a.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional, Sequence, Tuple

import sympy as sp

from .error_handler import MembershipViolation, NormMismatch, ZeroCharacterValue
from .logging_system import LogCategory, get_logging_system
from .rational import (RationalLike, diagonal, diagonal_entries, format_matrix, format_rational,
                       identity, is_rational_square, to_fraction, to_sympy)
from .root_data import Family, GroupKind

logger = get_logging_system().get_logger(LogCategory.SATAKE)


@dataclass(frozen=True)
class UnramifiedData:
    """
    Values at the uniformizer of the inducing character.

    For the quasi-split form, chi holds chi_1, ..., chi_(n-1) and the Galois
    block is given by (a, alpha, beta) with alpha^2 - a beta^2 = chi0.
    """
    chi0: Fraction
    chi: Tuple[Fraction, ...]
    a: Optional[Fraction] = None
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, 'chi0', to_fraction(self.chi0))
        object.__setattr__(self, 'chi', tuple(to_fraction(c) for c in self.chi))
        for name in ('a', 'alpha', 'beta'):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, to_fraction(value))

    @property
    def is_quasi_split(self) -> bool:
        return self.a is not None

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "chi0": format_rational(self.chi0),
            "chi": [format_rational(c) for c in self.chi],
        }
        if self.is_quasi_split:
            result.update(a=format_rational(self.a), alpha=format_rational(self.alpha),
                          beta=format_rational(self.beta))
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'UnramifiedData':
        return cls(
            chi0=to_fraction(data.get("chi0", 1)),
            chi=tuple(to_fraction(c) for c in data.get("chi", [])),
            a=to_fraction(data["a"]) if "a" in data else None,
            alpha=to_fraction(data["alpha"]) if "alpha" in data else None,
            beta=to_fraction(data["beta"]) if "beta" in data else None,
        )


@dataclass(frozen=True)
class SatakeParameter:
    matrix: sp.ImmutableMatrix
    mu: Fraction
    kind: GroupKind
    diag_eigenvalues: Optional[Tuple[Fraction, ...]] = None
    form: Optional[sp.ImmutableMatrix] = field(default=None, compare=False)

    @property
    def dimension(self) -> int:
        return self.matrix.rows

    @property
    def torus(self) -> Tuple[Fraction, ...]:
        """First half of the diagonal: the coordinates t_1, ..., t_k of the torus element."""
        if self.diag_eigenvalues is None:
            raise ValueError(f"parameter of {self.kind.name} is not diagonal")
        if self.kind.family is Family.GL:
            return self.diag_eigenvalues
        return self.diag_eigenvalues[:self.dimension // 2]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group": self.kind.name,
            "mu": format_rational(self.mu),
            "matrix": format_matrix(self.matrix),
        }


def j_matrix(k: int, symplectic: bool) -> sp.ImmutableMatrix:
    """
    The 2k x 2k matrix J of the similitude groups: antidiagonal ones, with the
    lower half negated in the symplectic case.
    """
    form = sp.zeros(2 * k, 2 * k)
    for i in range(k):
        form[i, 2 * k - 1 - i] = 1
        form[2 * k - 1 - i, i] = -1 if symplectic else 1
    return sp.ImmutableMatrix(form)


def quasi_split_form(n: int, a: RationalLike) -> sp.ImmutableMatrix:
    """Orthogonal J with its central 2 x 2 block replaced by the norm form diag(1, -a)."""
    form = sp.Matrix(j_matrix(n, symplectic=False))
    form[n - 1, n - 1], form[n - 1, n] = 1, 0
    form[n, n - 1], form[n, n] = 0, -to_sympy(a)
    return sp.ImmutableMatrix(form)


def similitude_factor(m: sp.MatrixBase, form: sp.MatrixBase) -> Fraction:
    """mu with M^t J M = mu J; raises MembershipViolation if there is none."""
    image = m.T * form * m
    i, j = next((i, j) for i in range(form.rows) for j in range(form.cols) if form[i, j] != 0)
    mu = image[i, j] / form[i, j]
    if image != mu * form:
        raise MembershipViolation("matrix is not a similitude of the given form")
    return to_fraction(mu)


def _check_nonzero(values: Sequence[Fraction], what: str) -> None:
    if any(v == 0 for v in values):
        raise ZeroCharacterValue(f"{what} has a zero value at the uniformizer", values=[str(v) for v in values])


def _check_membership(matrix: sp.ImmutableMatrix, form: sp.ImmutableMatrix, mu: Fraction, kind: GroupKind) -> None:
    try:
        found = similitude_factor(matrix, form)
    except MembershipViolation:
        raise MembershipViolation(f"parameter of {kind.name} fails the similitude equation")
    if found != mu:
        raise MembershipViolation(f"parameter of {kind.name} has similitude {found}, expected {mu}")


def satake_gl(chi: Sequence[RationalLike]) -> SatakeParameter:
    """diag(chi_1, ..., chi_m) in GL_m(C)."""
    values = tuple(to_fraction(c) for c in chi)
    if not values:
        raise ValueError("GL parameter needs at least one value")
    _check_nonzero(values, "GL character")
    return SatakeParameter(diagonal(values), Fraction(1), GroupKind.gl(len(values)), values)


def _split_gspin(data: UnramifiedData, kind: GroupKind, symplectic: bool) -> SatakeParameter:
    _check_nonzero((data.chi0,) + data.chi, "inducing character")
    values = data.chi + tuple(data.chi0 / c for c in reversed(data.chi))
    matrix = diagonal(values)
    form = j_matrix(len(data.chi), symplectic)
    _check_membership(matrix, form, data.chi0, kind)
    return SatakeParameter(matrix, data.chi0, kind, values, form)


def satake_gspin_odd(data: UnramifiedData) -> SatakeParameter:
    """diag(chi_1..chi_n, chi_0/chi_n..chi_0/chi_1) in GSp_2n(C)."""
    if not data.chi:
        raise ValueError("GSpin_2n+1 parameter needs n >= 1 values")
    return _split_gspin(data, GroupKind.gspin_odd(len(data.chi)), symplectic=True)


def satake_gspin_even_split(data: UnramifiedData) -> SatakeParameter:
    """diag(chi_1..chi_n, chi_0/chi_n..chi_0/chi_1) in GSO_2n(C)."""
    if not data.chi:
        raise ValueError("GSpin_2n parameter needs n >= 1 values")
    return _split_gspin(data, GroupKind.gspin_even(len(data.chi)), symplectic=False)


def satake_quasisplit(data: UnramifiedData) -> Tuple[SatakeParameter, SatakeParameter]:
    """
    (t_pi, t'_pi) for GSpin_2n^a: the full 2n x 2n parameter with the central
    block [[alpha, beta a], [beta, alpha]], and its reduction to GSp_2(n-1)(C).
    """
    if not data.is_quasi_split or data.alpha is None or data.beta is None:
        raise ValueError("quasi-split data needs a, alpha and beta")
    if not data.chi:
        raise ValueError("quasi-split GSpin_2n needs n >= 2")
    a, alpha, beta = data.a, data.alpha, data.beta
    norm = alpha * alpha - a * beta * beta
    if norm != data.chi0:
        raise NormMismatch(f"alpha^2 - a beta^2 = {norm} but chi0 = {data.chi0}",
                           norm=norm, chi0=data.chi0)
    _check_nonzero((data.chi0,) + data.chi, "inducing character")
    if is_rational_square(a):
        logger.warning(f"square-class datum a = {a} is a square; the form is split")

    n = len(data.chi) + 1
    kind = GroupKind.gspin_quasi_split(n, a)
    tail = tuple(data.chi0 / c for c in reversed(data.chi))
    full = sp.Matrix(sp.diag(*[to_sympy(v) for v in data.chi + (Fraction(1), Fraction(1)) + tail]))
    full[n - 1, n - 1], full[n - 1, n] = to_sympy(alpha), to_sympy(beta * a)
    full[n, n - 1], full[n, n] = to_sympy(beta), to_sympy(alpha)
    full = sp.ImmutableMatrix(full)
    form = quasi_split_form(n, a)
    _check_membership(full, form, data.chi0, kind)
    diag = diagonal_entries(full)
    full_param = SatakeParameter(full, data.chi0, kind, tuple(diag) if diag is not None else None, form)

    reduced_values = data.chi + tail
    reduced = diagonal(reduced_values)
    reduced_form = j_matrix(n - 1, symplectic=True)
    reduced_kind = GroupKind.gspin_odd(n - 1)
    _check_membership(reduced, reduced_form, data.chi0, reduced_kind)
    return full_param, SatakeParameter(reduced, data.chi0, reduced_kind, reduced_values, reduced_form)


def galois_block(data: UnramifiedData) -> sp.ImmutableMatrix:
    """The 2 x 2 block [[alpha, beta a], [beta, alpha]] of a quasi-split parameter."""
    return sp.ImmutableMatrix([[to_sympy(data.alpha), to_sympy(data.beta * data.a)],
                               [to_sympy(data.beta), to_sympy(data.alpha)]])


def galois_twist(m: sp.MatrixBase) -> sp.ImmutableMatrix:
    """
    Outer automorphism of GSO_2n(C) by which the Galois group acts on the
    L-group of the quasi-split form: conjugation by diag(I_(n-1), w, I_(n-1)).
    On the torus it exchanges t_n and mu/t_n.
    """
    size = m.rows
    if size % 2 or size < 2:
        raise ValueError("galois_twist needs an even-dimensional matrix")
    n = size // 2
    j = sp.Matrix(identity(size))
    j[n - 1, n - 1], j[n, n] = 0, 0
    j[n - 1, n], j[n, n - 1] = 1, 1
    return sp.ImmutableMatrix(j * m * j)


def satake_from_data(kind: GroupKind, data: UnramifiedData) -> SatakeParameter:
    """Dispatch to the parameter construction of the given kind; quasi-split returns the full t_pi."""
    if kind.family is Family.GL:
        return satake_gl(data.chi)
    if kind.family is Family.GSPIN_ODD:
        return satake_gspin_odd(data)
    if kind.family is Family.GSPIN_EVEN_SPLIT:
        return satake_gspin_even_split(data)
    return satake_quasisplit(data)[0]


def unramified_data_of(param: SatakeParameter) -> UnramifiedData:
    """Recover (chi0, chi) from a diagonal split parameter."""
    return UnramifiedData(chi0=param.mu, chi=param.torus)
