"""
Local L-factors as truncated power series in T = q^(-s).

All series have exact rational coefficients and a fixed truncation order R;
L-factors are inverses of det(I - M T) computed from power traces.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Tuple, Union

import sympy as sp

from .characters import (DominantWeight, NormalizationExponent, SimilitudeFamily, dual_group_char,
                         elementary_symmetric, enumerate_dominant, gl_character, jacobi_trudi, power_traces,
                         similitude_char, sym2_matrix, tensor_matrix, wedge2_matrix)
from .error_handler import CaseMismatch, InvalidRank, NonCancellingQExponent, NonUnitConstantTerm
from .logging_system import LogCategory, get_logging_system
from .rational import RationalLike, format_rational, to_fraction, to_sympy
from .root_data import GroupKind, ModulusRole, modulus_exponent
from .satake import SatakeParameter

logger = get_logging_system().get_logger(LogCategory.LFACTORS)

DEFAULT_ORDER = 8


@dataclass(frozen=True)
class TruncatedSeries:
    """c_0 + c_1 T + ... + c_R T^R, arithmetic closed at order R."""
    order: int
    coefficients: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("truncation order must be non-negative")
        coefficients = tuple(to_fraction(c) for c in self.coefficients)
        if len(coefficients) != self.order + 1:
            raise ValueError(f"expected {self.order + 1} coefficients, got {len(coefficients)}")
        object.__setattr__(self, 'coefficients', coefficients)

    @classmethod
    def from_coefficients(cls, coefficients: Iterable[RationalLike], order: int) -> 'TruncatedSeries':
        """Truncate or zero-pad to the given order."""
        values = [to_fraction(c) for c in coefficients][:order + 1]
        values += [Fraction(0)] * (order + 1 - len(values))
        return cls(order, tuple(values))

    @classmethod
    def one(cls, order: int) -> 'TruncatedSeries':
        return cls.from_coefficients([1], order)

    def coefficient(self, r: int) -> Fraction:
        return self.coefficients[r] if 0 <= r <= self.order else Fraction(0)

    def _check(self, other: 'TruncatedSeries') -> None:
        if other.order != self.order:
            raise ValueError(f"series orders differ: {self.order} vs {other.order}")

    def __add__(self, other: 'TruncatedSeries') -> 'TruncatedSeries':
        self._check(other)
        return TruncatedSeries(self.order, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: 'TruncatedSeries') -> 'TruncatedSeries':
        self._check(other)
        return TruncatedSeries(self.order, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> 'TruncatedSeries':
        return TruncatedSeries(self.order, tuple(-a for a in self.coefficients))

    def __mul__(self, other: Union['TruncatedSeries', RationalLike]) -> 'TruncatedSeries':
        if not isinstance(other, TruncatedSeries):
            factor = to_fraction(other)
            return TruncatedSeries(self.order, tuple(factor * a for a in self.coefficients))
        self._check(other)
        a, b = self.coefficients, other.coefficients
        product = [sum((a[i] * b[r - i] for i in range(r + 1)), Fraction(0)) for r in range(self.order + 1)]
        return TruncatedSeries(self.order, tuple(product))

    __rmul__ = __mul__

    def truncate(self, order: int) -> 'TruncatedSeries':
        return TruncatedSeries.from_coefficients(self.coefficients, order)

    def coefficients_as_strings(self) -> List[str]:
        return [format_rational(c) for c in self.coefficients]

    def __str__(self) -> str:
        terms = []
        for r, c in enumerate(self.coefficients):
            if c:
                terms.append(f"{c}" if r == 0 else f"({c})T^{r}")
        return " + ".join(terms) + f" + O(T^{self.order + 1})" if terms else f"O(T^{self.order + 1})"


class CaseFamily(Enum):
    A_ODD = "a-odd"
    A_EVEN_SPLIT = "a-even-split"
    A_EVEN_QUASI_SPLIT = "a-even-quasi-split"
    B_ODD = "b-odd"
    B_EVEN_SPLIT = "b-even-split"
    B_EVEN_QUASI_SPLIT = "b-even-quasi-split"


class SecondRep(Enum):
    WEDGE2 = "Wedge2"
    SYM2 = "Sym2"


@dataclass(frozen=True)
class IdentityCase:
    """
    One of the six identity cases with its ranks.

    Case A: n is the rank of GL_n (and of G), m the rank of H.
    Case B: n is the rank of G, m the rank of GL_m.
    """
    family: CaseFamily
    n: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, 'family', CaseFamily(self.family))
        n, m = self.n, self.m
        if n < 1 or m < 1:
            raise InvalidRank(f"ranks must be positive: n={n}, m={m}")
        family = self.family
        if family is CaseFamily.A_ODD and not n <= m:
            raise InvalidRank(f"{family.value} needs n <= m", n=n, m=m)
        if family in (CaseFamily.A_EVEN_SPLIT, CaseFamily.A_EVEN_QUASI_SPLIT) and not n < m:
            raise InvalidRank(f"{family.value} needs n < m", n=n, m=m)
        if family is CaseFamily.B_ODD and not m > n:
            raise InvalidRank(f"{family.value} needs m > n", n=n, m=m)
        if family in (CaseFamily.B_EVEN_SPLIT, CaseFamily.B_EVEN_QUASI_SPLIT) and not m >= n:
            raise InvalidRank(f"{family.value} needs m >= n", n=n, m=m)
        if family is CaseFamily.B_EVEN_QUASI_SPLIT and n < 2:
            raise InvalidRank("the quasi-split G = GSpin_2n^a needs n >= 2", n=n)

    @property
    def key(self) -> str:
        return f"{self.family.value}:n={self.n}:m={self.m}"

    @property
    def is_case_a(self) -> bool:
        return self.family.value.startswith("a-")

    @property
    def is_odd(self) -> bool:
        return self.family in (CaseFamily.A_ODD, CaseFamily.B_ODD)

    @property
    def is_quasi_split(self) -> bool:
        return self.family in (CaseFamily.A_EVEN_QUASI_SPLIT, CaseFamily.B_EVEN_QUASI_SPLIT)

    @property
    def shift_u(self) -> Fraction:
        return Fraction(self.n - 2, 2) if self.is_odd else Fraction(self.n - 1, 2)

    @property
    def shift_ell(self) -> int:
        return self.m - self.n if self.is_odd else self.m - self.n - 1

    @property
    def second_rep(self) -> SecondRep:
        if self.family in (CaseFamily.A_EVEN_SPLIT, CaseFamily.B_EVEN_SPLIT):
            return SecondRep.SYM2
        return SecondRep.WEDGE2

    @property
    def similitude_family(self) -> SimilitudeFamily:
        """Dual group family of the character in the zeta sum."""
        return SimilitudeFamily.GSO if self.family is CaseFamily.A_EVEN_SPLIT else SimilitudeFamily.GSP

    @property
    def padding_rank(self) -> int:
        """Rank the weights are padded to: m, or m-1 for the quasi-split H."""
        return self.m - 1 if self.is_quasi_split else self.m

    def group_kind(self, role: ModulusRole) -> GroupKind:
        """
        Group of the given modulus role in case A. For the quasi-split H this is
        its split form, which has the same absolute root datum.
        """
        if not self.is_case_a:
            raise CaseMismatch(f"{self.family.value} has no modulus bookkeeping")
        role = ModulusRole(role)
        if role is ModulusRole.DELTA_GL:
            return GroupKind.gl(self.n)
        if role is ModulusRole.DELTA_G:
            return GroupKind.gspin_even(self.n) if self.is_odd else GroupKind.gspin_odd(self.n)
        return GroupKind.gspin_odd(self.m) if self.is_odd else GroupKind.gspin_even(self.m)

    def to_dict(self) -> dict:
        return {
            "case": self.family.value,
            "n": self.n,
            "m": self.m,
            "shift_u": format_rational(self.shift_u),
            "shift_ell": self.shift_ell,
            "second_rep": self.second_rep.value,
        }


def _matrix_of(parameter) -> sp.MatrixBase:
    return parameter.matrix if isinstance(parameter, SatakeParameter) else parameter


def det_one_minus_MT(m: sp.MatrixBase, order: int) -> TruncatedSeries:
    """det(I - M T) = sum (-1)^k e_k(M) T^k, from power traces by Newton's identities."""
    degree = min(m.rows, order)
    e = elementary_symmetric(power_traces(m, degree), degree)
    return TruncatedSeries.from_coefficients([c if k % 2 == 0 else -c for k, c in enumerate(e)], order)


def series_inverse(p: TruncatedSeries) -> TruncatedSeries:
    """q with p q = 1 up to the truncation order."""
    c = p.coefficients
    if c[0] == 0:
        raise NonUnitConstantTerm("series has zero constant term")
    inverse = [1 / c[0]]
    for r in range(1, p.order + 1):
        acc = sum((c[i] * inverse[r - i] for i in range(1, r + 1)), Fraction(0))
        inverse.append(-acc / c[0])
    return TruncatedSeries(p.order, tuple(inverse))


def series_quotient(numerator: TruncatedSeries, denominator: TruncatedSeries) -> TruncatedSeries:
    return numerator * series_inverse(denominator)


def substitute_T_squared(p: TruncatedSeries) -> TruncatedSeries:
    """p(T^2), truncated at the same order."""
    values = [Fraction(0)] * (p.order + 1)
    for i, c in enumerate(p.coefficients):
        if 2 * i > p.order:
            break
        values[2 * i] = c
    return TruncatedSeries(p.order, tuple(values))


def l_factor(m: sp.MatrixBase, order: int) -> TruncatedSeries:
    """det(I - M T)^(-1)."""
    return series_inverse(det_one_minus_MT(m, order))


def rankin_selberg_L(t_pi, t_tau, order: int) -> TruncatedSeries:
    """L(s, pi x tau) = det(I - (t_pi (x) t_tau) T)^(-1)."""
    return l_factor(tensor_matrix(_matrix_of(t_pi), _matrix_of(t_tau)), order)


def second_L(t_tau, omega: RationalLike, which: SecondRep, order: int) -> TruncatedSeries:
    """L(2s, tau, R (x) omega) with R the exterior or symmetric square."""
    m = _matrix_of(t_tau)
    square = wedge2_matrix(m) if SecondRep(which) is SecondRep.WEDGE2 else sym2_matrix(m)
    twisted = square * to_sympy(omega)
    return series_inverse(substitute_T_squared(det_one_minus_MT(twisted, order)))


def _zeta_inputs(case: IdentityCase, t_pi: SatakeParameter, t_tau: SatakeParameter):
    if not case.is_case_a:
        raise CaseMismatch(f"zeta series are only defined for case A, not {case.family.value}")
    torus = t_pi.torus
    if len(torus) != case.padding_rank:
        raise CaseMismatch(
            f"{case.key} needs a parameter of rank {case.padding_rank}, got {len(torus)}")
    tau = t_tau.torus
    if len(tau) != case.n:
        raise CaseMismatch(f"{case.key} needs a GL_{case.n} parameter, got GL_{len(tau)}")
    return torus, tau


def _zeta_term(case: IdentityCase, delta: DominantWeight, torus, mu, tau,
               exponent: NormalizationExponent) -> Fraction:
    character = similitude_char(case.similitude_family, delta.pad(case.padding_rank), torus, mu, exponent)
    if character == 0:
        return Fraction(0)
    return character * gl_character(delta, tau)


def zeta_series(case: IdentityCase, t_pi: SatakeParameter, t_tau: SatakeParameter, order: int,
                exponent: NormalizationExponent = NormalizationExponent.HALF) -> TruncatedSeries:
    """
    sum over dominant delta with tr(delta) <= R of
    mu^e chi_delta_bar(t_pi mu^(-1/2)) s_delta(t_tau) T^tr(delta).

    t_pi is the full parameter in the split cases and t'_pi in the quasi-split case.
    """
    torus, tau = _zeta_inputs(case, t_pi, t_tau)
    coefficients = []
    for j in range(order + 1):
        coefficients.append(sum((_zeta_term(case, delta, torus, t_pi.mu, tau, exponent)
                                 for delta in enumerate_dominant(case.n, j)), Fraction(0)))
    return TruncatedSeries(order, tuple(coefficients))


def whittaker_q_exponent(case: IdentityCase, delta: DominantWeight) -> Fraction:
    """
    Residual power of q in W_pi(delta_bar) W_tau(delta) delta_G^(-1)(delta) q^(-(u-ell) tr delta),
    from the Casselman-Shalika normalization W(t) = delta^(1/2)(t) chi(t).
    """
    e_h = modulus_exponent(ModulusRole.DELTA_H, case, delta).value
    e_gl = modulus_exponent(ModulusRole.DELTA_GL, case, delta).value
    e_g = modulus_exponent(ModulusRole.DELTA_G, case, delta).value
    return -e_h / 2 - e_gl / 2 + e_g - (case.shift_u - case.shift_ell) * delta.trace


def zeta_from_whittaker(case: IdentityCase, t_pi: SatakeParameter, t_tau: SatakeParameter, order: int,
                        exponent: NormalizationExponent = NormalizationExponent.HALF) -> TruncatedSeries:
    """
    The zeta integral summed term by term from spherical Whittaker values and
    modulus characters, with q kept symbolic. Every term must come out with
    no residual power of q.

    W_pi is the dual-group character on the full eigenvalues of t_pi and W_tau
    the Jacobi-Trudi determinant, so no term is shared with zeta_series.
    """
    torus, tau = _zeta_inputs(case, t_pi, t_tau)
    family = case.similitude_family
    coefficients = []
    for j in range(order + 1):
        total = Fraction(0)
        for delta in enumerate_dominant(case.n, j):
            residual = whittaker_q_exponent(case, delta)
            if residual != 0:
                raise NonCancellingQExponent(
                    f"{case.key}: term {delta} keeps q^{residual}", case=case.key, delta=str(delta),
                    residual=residual)
            w_pi = dual_group_char(family, delta.pad(case.padding_rank), torus, t_pi.mu, exponent)
            total += w_pi * jacobi_trudi(delta, tau)
        coefficients.append(total)
    return TruncatedSeries(order, tuple(coefficients))
