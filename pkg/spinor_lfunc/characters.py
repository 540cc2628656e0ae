"""
Exact characters of GL_n(C), Sp_2k(C) and SO_2k(C).

Two independent evaluation routes are provided: Weyl alternant ratios at
regular rational points, and weight tables built with Freudenthal's
multiplicity recursion. The weight tables also drive the similitude
normalization, which must be evaluated at non-regular points (for example
the trivial Satake parameter).
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy as sp

from .config_manager import get_config_manager
from .error_handler import (NonSquareSimilitude, NonzeroLastPart, OracleBudgetExceeded,
                            SingularAlternant, ZeroSimilitude)
from .logging_system import LogCategory, get_logging_system
from .rational import RationalLike, rational_sqrt, to_fraction, to_sympy

logger = get_logging_system().get_logger(LogCategory.CHARACTERS)

# hard ceiling for internal weight tables
_TABLE_RANK_LIMIT = 6
_TABLE_WEIGHT_LIMIT = 16


class CharacterGroup(Enum):
    GL = "gl"
    SP = "sp"
    SO_EVEN = "so"


class SimilitudeFamily(Enum):
    GSP = "gsp"
    GSO = "gso"


class NormalizationExponent(Enum):
    """Power of mu in front of the classical character."""
    HALF = "tr_delta/2"
    FULL = "tr_delta"

    def value_for(self, trace: int) -> Fraction:
        if self is NormalizationExponent.HALF:
            return Fraction(trace, 2)
        return Fraction(trace)


@dataclass(frozen=True)
class DominantWeight:
    """Weakly decreasing tuple of non-negative integers."""
    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(k) for k in self.parts)
        object.__setattr__(self, 'parts', parts)
        if any(k < 0 for k in parts):
            raise ValueError(f"dominant weight has a negative part: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"dominant weight is not weakly decreasing: {parts}")

    @property
    def trace(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def pad(self, length: int) -> 'PaddedWeight':
        if length < len(self.parts):
            raise ValueError(f"cannot pad {self.parts} to length {length}")
        return PaddedWeight(self.parts + (0,) * (length - len(self.parts)), len(self.parts))

    def __str__(self) -> str:
        return "(" + ",".join(str(k) for k in self.parts) + ")"


@dataclass(frozen=True)
class PaddedWeight:
    """A dominant weight right-padded with zeros to a classical rank."""
    parts: Tuple[int, ...]
    source_length: int

    def __post_init__(self):
        DominantWeight(self.parts)
        if any(self.parts[self.source_length:]):
            raise ValueError("padded entries must be zero")

    @classmethod
    def of(cls, parts: Sequence[int]) -> 'PaddedWeight':
        return cls(tuple(parts), len(parts))

    @property
    def rank(self) -> int:
        return len(self.parts)

    @property
    def trace(self) -> int:
        return sum(self.parts)


def _as_parts(weight) -> Tuple[int, ...]:
    return tuple(getattr(weight, 'parts', weight))


def _eigenvalues(x: Iterable[RationalLike]) -> Tuple[Fraction, ...]:
    values = tuple(to_fraction(v) for v in x)
    if any(v == 0 for v in values):
        raise SingularAlternant("eigenvalue list contains zero", values=values)
    return values


def _det(rows: List[List[Fraction]]) -> Fraction:
    if not rows:
        return Fraction(1)
    m = sp.Matrix([[to_sympy(v) for v in row] for row in rows])
    return to_fraction(m.det(method='bareiss'))


def _alternant_ratio(numerator: List[List[Fraction]], denominator: List[List[Fraction]],
                     what: str, x: Tuple[Fraction, ...]) -> Fraction:
    den = _det(denominator)
    if den == 0:
        raise SingularAlternant(f"{what}: evaluation point is not regular", point=x)
    return _det(numerator) / den


# Alternant formulas

def schur_gl(delta, x: Iterable[RationalLike]) -> Fraction:
    """
    Schur polynomial s_delta(x) as the bialternant det(x_i^(k_j+n-j)) / det(x_i^(n-j)).

    A weight with fewer parts than eigenvalues is padded with zeros.
    """
    x = _eigenvalues(x)
    n = len(x)
    parts = _as_parts(delta)
    if len(parts) > n:
        raise ValueError(f"weight {parts} has more parts than {n} eigenvalues")
    parts = parts + (0,) * (n - len(parts))
    num = [[xi ** (parts[j] + n - 1 - j) for j in range(n)] for xi in x]
    den = [[xi ** (n - 1 - j) for j in range(n)] for xi in x]
    return _alternant_ratio(num, den, "schur_gl", x)


def char_sp(delta_bar, x: Iterable[RationalLike]) -> Fraction:
    """Character of Sp_2k(C) with highest weight delta_bar at diag(x, x^-1)."""
    x = _eigenvalues(x)
    k = len(x)
    parts = _as_parts(delta_bar)
    if len(parts) != k:
        raise ValueError(f"weight {parts} does not have rank {k}")
    exps = [parts[j] + k - j for j in range(k)]
    base = [k - j for j in range(k)]
    num = [[xi ** l - xi ** -l for l in exps] for xi in x]
    den = [[xi ** m - xi ** -m for m in base] for xi in x]
    return _alternant_ratio(num, den, "char_sp", x)


def char_so_even(delta_bar, x: Iterable[RationalLike]) -> Fraction:
    """
    Character of SO_2k(C) with highest weight delta_bar at diag(x, x^-1).

    Only weights with a zero last part are accepted; for them the odd
    alternant vanishes and the character is det(x^l + x^-l) / det(x^m + x^-m).
    """
    x = _eigenvalues(x)
    k = len(x)
    parts = _as_parts(delta_bar)
    if len(parts) != k:
        raise ValueError(f"weight {parts} does not have rank {k}")
    if parts[-1] != 0:
        raise NonzeroLastPart(f"SO_{2 * k} weight {parts} has a nonzero last part")
    exps = [parts[j] + k - 1 - j for j in range(k)]
    base = [k - 1 - j for j in range(k)]
    num = [[xi ** l + xi ** -l for l in exps] for xi in x]
    den = [[xi ** m + xi ** -m for m in base] for xi in x]
    return _alternant_ratio(num, den, "char_so_even", x)


# Freudenthal weight tables

def _positive_roots(group: CharacterGroup, k: int) -> List[Tuple[int, ...]]:
    roots = []
    for i, j in itertools.combinations(range(k), 2):
        minus = [0] * k
        minus[i], minus[j] = 1, -1
        roots.append(tuple(minus))
        if group is not CharacterGroup.GL:
            plus = [0] * k
            plus[i], plus[j] = 1, 1
            roots.append(tuple(plus))
    if group is CharacterGroup.SP:
        for i in range(k):
            long_root = [0] * k
            long_root[i] = 2
            roots.append(tuple(long_root))
    return roots


def _rho(group: CharacterGroup, k: int) -> Tuple[int, ...]:
    if group is CharacterGroup.SP:
        return tuple(range(k, 0, -1))
    return tuple(range(k - 1, -1, -1))


def _dominant_conjugate(group: CharacterGroup, weight: Tuple[int, ...]) -> Tuple[int, ...]:
    if group is CharacterGroup.GL:
        return tuple(sorted(weight, reverse=True))
    conj = sorted((abs(c) for c in weight), reverse=True)
    if group is CharacterGroup.SO_EVEN:
        negatives = sum(1 for c in weight if c < 0)
        if negatives % 2 and conj[-1] != 0:
            conj[-1] = -conj[-1]
    return tuple(conj)


def _in_root_cone(group: CharacterGroup, highest: Tuple[int, ...], weight: Tuple[int, ...]) -> bool:
    """Whether highest - weight is a non-negative integral combination of simple roots."""
    diff = [a - b for a, b in zip(highest, weight)]
    partial = list(itertools.accumulate(diff))
    k = len(diff)
    if group is CharacterGroup.GL:
        return partial[-1] == 0 and all(p >= 0 for p in partial)
    if group is CharacterGroup.SP:
        return all(p >= 0 for p in partial) and partial[-1] % 2 == 0
    if k == 1:
        return diff[0] == 0
    if partial[-1] % 2:
        return False
    last = partial[-1] // 2
    coefficients = partial[:k - 2] + [partial[k - 2] - last, last]
    return all(c >= 0 for c in coefficients)


def _partitions_up_to(total: int, parts: int, largest: int) -> Iterable[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, largest), -1, -1):
        for rest in _partitions_up_to(total - first, parts - 1, first):
            yield (first,) + rest


def _dominant_candidates(group: CharacterGroup, highest: Tuple[int, ...]) -> List[Tuple[int, ...]]:
    k = len(highest)
    size = sum(highest)
    if group is CharacterGroup.GL:
        return list(_partitions_up_to(size, k, size))
    candidates = []
    for total in range(size % 2, size + 1, 2):
        for part in _partitions_up_to(total, k, total):
            candidates.append(part)
            if group is CharacterGroup.SO_EVEN and k > 1 and part[-1] != 0:
                candidates.append(part[:-1] + (-part[-1],))
    return candidates


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _orbit(group: CharacterGroup, weight: Tuple[int, ...]) -> set:
    k = len(weight)
    if group is CharacterGroup.GL:
        return set(itertools.permutations(weight))
    orbit = set()
    for signs in itertools.product((1, -1), repeat=k):
        if group is CharacterGroup.SO_EVEN and signs.count(-1) % 2:
            continue
        signed = tuple(s * c for s, c in zip(signs, weight))
        orbit.update(itertools.permutations(signed))
    return orbit


@lru_cache(maxsize=None)
def dominant_multiplicities(group: CharacterGroup, highest: Tuple[int, ...]) -> Dict[Tuple[int, ...], int]:
    """
    Multiplicities of the dominant weights of the irreducible representation
    with the given highest weight, by Freudenthal's recursion.
    """
    highest = tuple(highest)
    k = len(highest)
    if k > _TABLE_RANK_LIMIT or sum(highest) > _TABLE_WEIGHT_LIMIT:
        raise OracleBudgetExceeded(f"weight table for {group.value} {highest} is too large")
    if group is CharacterGroup.SO_EVEN and highest[-1] != 0:
        raise NonzeroLastPart(f"SO_{2 * k} weight {highest} has a nonzero last part")
    DominantWeight(highest)

    rho = _rho(group, k)
    roots = _positive_roots(group, k)
    dominant = [mu for mu in _dominant_candidates(group, highest) if _in_root_cone(group, highest, mu)]

    def norm_shifted(mu):
        shifted = [a + b for a, b in zip(mu, rho)]
        return _dot(shifted, shifted)

    dominant.sort(key=norm_shifted, reverse=True)
    top = norm_shifted(highest)
    table: Dict[Tuple[int, ...], int] = {highest: 1}

    for mu in dominant:
        if mu == highest:
            continue
        total = Fraction(0)
        for alpha in roots:
            j = 1
            while True:
                shifted = tuple(m + j * a for m, a in zip(mu, alpha))
                mult = table.get(_dominant_conjugate(group, shifted))
                if mult is None:
                    break
                total += mult * _dot(shifted, alpha)
                j += 1
        value = 2 * total / (top - norm_shifted(mu))
        if value.denominator != 1:
            raise ArithmeticError(f"non-integral multiplicity {value} at {mu}")
        if value:
            table[mu] = int(value)

    logger.debug(f"weight table {group.value} {highest}: {len(table)} dominant weights")
    return table


@lru_cache(maxsize=None)
def weight_table(group: CharacterGroup, highest: Tuple[int, ...]) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    """All weights with multiplicities, sorted for deterministic evaluation."""
    full: Dict[Tuple[int, ...], int] = {}
    for mu, mult in dominant_multiplicities(group, tuple(highest)).items():
        for w in _orbit(group, mu):
            full[w] = mult
    return tuple(sorted(full.items(), reverse=True))


def _monomial(x: Sequence[Fraction], w: Sequence[int]) -> Fraction:
    value = Fraction(1)
    for xi, wi in zip(x, w):
        if wi:
            value *= xi ** wi
    return value


def freudenthal_char(group: CharacterGroup, delta_bar, x: Iterable[RationalLike],
                     rank_budget: Optional[int] = None,
                     weight_budget: Optional[int] = None) -> Fraction:
    """
    Character value from the Freudenthal weight table: sum of mult(w) * x^w.

    Independent of the alternant formulas and valid at non-regular points.
    """
    group = CharacterGroup(group)
    parts = _as_parts(delta_bar)
    x = _eigenvalues(x)
    if len(parts) != len(x):
        raise ValueError(f"weight {parts} does not match {len(x)} eigenvalues")
    if rank_budget is None:
        rank_budget = get_config_manager().budget("oracle_rank")
    if weight_budget is None:
        weight_budget = get_config_manager().budget("oracle_weight")
    if len(parts) > rank_budget or sum(parts) > weight_budget:
        raise OracleBudgetExceeded(
            f"oracle budget is rank <= {rank_budget}, |weight| <= {weight_budget}",
            rank=len(parts), weight=sum(parts))
    return sum((mult * _monomial(x, w) for w, mult in weight_table(group, parts)), Fraction(0))


def gl_character(delta, x: Iterable[RationalLike]) -> Fraction:
    """s_delta(x), through the bialternant when x is regular and the weight table otherwise."""
    x = _eigenvalues(x)
    if len(set(x)) == len(x):
        return schur_gl(delta, x)
    parts = _as_parts(delta)
    parts = parts + (0,) * (len(x) - len(parts))
    return sum((mult * _monomial(x, w) for w, mult in weight_table(CharacterGroup.GL, parts)), Fraction(0))


def similitude_char(family: SimilitudeFamily, delta_bar, t: Iterable[RationalLike], mu: RationalLike,
                    exponent: NormalizationExponent = NormalizationExponent.HALF) -> Fraction:
    """
    mu^e * chi_delta_bar(t * mu^(-1/2)) for the similitude element with
    eigenvalues (t_1, ..., t_k, mu/t_k, ..., mu/t_1).

    Evaluated weight by weight: the monomial x^w contributes
    t^w * mu^(e - |w|/2), which is integral in mu whenever e = tr(delta)/2.
    """
    family = SimilitudeFamily(family)
    mu = to_fraction(mu)
    if mu == 0:
        raise ZeroSimilitude("similitude factor is zero")
    t = _eigenvalues(t)
    parts = _as_parts(delta_bar)
    if len(parts) != len(t):
        raise ValueError(f"weight {parts} does not match {len(t)} torus coordinates")
    group = CharacterGroup.SP if family is SimilitudeFamily.GSP else CharacterGroup.SO_EVEN
    e = NormalizationExponent(exponent).value_for(sum(parts))

    root = None
    total = Fraction(0)
    for w, mult in weight_table(group, parts):
        power = e - Fraction(sum(w), 2)
        if power.denominator == 1:
            scale = mu ** int(power)
        else:
            if root is None:
                root = rational_sqrt(mu)
                if root is None:
                    raise NonSquareSimilitude(
                        f"normalization {exponent.value} needs sqrt({mu})", mu=mu)
            scale = root ** int(2 * power)
        total += mult * _monomial(t, w) * scale
    return total


def dual_group_char(family: SimilitudeFamily, delta_bar, t: Iterable[RationalLike], mu: RationalLike,
                    exponent: NormalizationExponent = NormalizationExponent.HALF) -> Fraction:
    """
    The same value as similitude_char, computed on the dual group itself: the
    Weyl alternant in the full eigenvalues (t_i, mu/t_i), whose ratio is the
    character with highest weight t^delta_bar. Non-regular points are summed
    from the weight table with negative weights read as powers of mu/t_i.
    """
    family = SimilitudeFamily(family)
    mu = to_fraction(mu)
    if mu == 0:
        raise ZeroSimilitude("similitude factor is zero")
    t = _eigenvalues(t)
    parts = _as_parts(delta_bar)
    k = len(t)
    if len(parts) != k:
        raise ValueError(f"weight {parts} does not match {k} torus coordinates")
    symplectic = family is SimilitudeFamily.GSP
    if not symplectic and parts[-1] != 0:
        raise NonzeroLastPart(f"GSO_{2 * k} weight {parts} has a nonzero last part")
    dual = tuple(mu / ti for ti in t)
    shift = 1 if symplectic else 0
    sign = -1 if symplectic else 1
    exps = [parts[j] + k - j - 1 + shift for j in range(k)]
    base = [k - j - 1 + shift for j in range(k)]

    den = _det([[ti ** l + sign * di ** l for l in base] for ti, di in zip(t, dual)])
    if den != 0:
        value = _det([[ti ** l + sign * di ** l for l in exps] for ti, di in zip(t, dual)]) / den
    else:
        group = CharacterGroup.SP if symplectic else CharacterGroup.SO_EVEN
        value = Fraction(0)
        for w, mult in weight_table(group, parts):
            term = Fraction(mult)
            for ti, di, wi in zip(t, dual, w):
                term *= ti ** wi if wi >= 0 else di ** -wi
            missing = sum(parts) - sum(abs(wi) for wi in w)
            if missing < 0 or missing % 2:
                raise ArithmeticError(f"weight {w} is not below {parts}")
            value += term * mu ** (missing // 2)

    if NormalizationExponent(exponent) is NormalizationExponent.HALF:
        return value
    if sum(parts) % 2 == 0:
        return value * mu ** (sum(parts) // 2)
    root = rational_sqrt(mu)
    if root is None:
        raise NonSquareSimilitude(f"normalization {exponent.value} needs sqrt({mu})", mu=mu)
    return value * root ** sum(parts)


def jacobi_trudi(delta, x: Iterable[RationalLike]) -> Fraction:
    """s_delta(x) = det(h_(delta_i - i + j)), with h_k from the power sums of x."""
    x = tuple(to_fraction(v) for v in x)
    parts = tuple(k for k in _as_parts(delta) if k)
    if not parts:
        return Fraction(1)
    size = parts[0] + len(parts)
    sums = [sum((xi ** p for xi in x), Fraction(0)) for p in range(1, size + 1)]
    h = complete_homogeneous(sums, size)
    rows = [[h[parts[i] - i + j] if parts[i] - i + j >= 0 else Fraction(0) for j in range(len(parts))]
            for i in range(len(parts))]
    return _det(rows)


# Matrix constructions

def power_traces(m: sp.MatrixBase, count: int) -> List[Fraction]:
    """[tr(M), tr(M^2), ..., tr(M^count)]."""
    if m.rows == 0:
        return [Fraction(0)] * count
    traces = []
    power = m
    for j in range(count):
        if j:
            power = power * m
        traces.append(to_fraction(power.trace()))
    return traces


def complete_homogeneous(traces: Sequence[Fraction], r: int) -> List[Fraction]:
    """h_0..h_r from power sums via k*h_k = sum_{i=1..k} p_i h_(k-i)."""
    h = [Fraction(1)]
    for k in range(1, r + 1):
        h.append(sum((traces[i - 1] * h[k - i] for i in range(1, k + 1)), Fraction(0)) / k)
    return h


def elementary_symmetric(traces: Sequence[Fraction], r: int) -> List[Fraction]:
    """e_0..e_r from power sums via k*e_k = sum_{i=1..k} (-1)^(i-1) e_(k-i) p_i."""
    e = [Fraction(1)]
    for k in range(1, r + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            term = e[k - i] * traces[i - 1]
            acc += term if i % 2 else -term
        e.append(acc / k)
    return e


def sym_power_trace(r: int, m: sp.MatrixBase, budget: Optional[int] = None) -> Fraction:
    """tr Sym^r(M) without eigenvalues, via Newton's identities."""
    if r < 0:
        raise ValueError("symmetric power index must be non-negative")
    if budget is None:
        budget = get_config_manager().budget("sym_power")
    if r > budget:
        raise OracleBudgetExceeded(f"symmetric power {r} exceeds budget {budget}")
    if r == 0:
        return Fraction(1)
    return complete_homogeneous(power_traces(m, r), r)[r]


def wedge2_matrix(m: sp.MatrixBase) -> sp.ImmutableMatrix:
    """Matrix of the exterior square on the basis e_i^e_j, i < j, in lexicographic order."""
    basis = list(itertools.combinations(range(m.rows), 2))
    if not basis:
        return sp.ImmutableMatrix(0, 0, [])
    return sp.ImmutableMatrix([
        [m[i, k] * m[j, l] - m[i, l] * m[j, k] for (k, l) in basis]
        for (i, j) in basis
    ])


def sym2_matrix(m: sp.MatrixBase) -> sp.ImmutableMatrix:
    """Matrix of the symmetric square on the basis e_i*e_j, i <= j, in lexicographic order."""
    basis = list(itertools.combinations_with_replacement(range(m.rows), 2))

    def coefficient(i, j, k, l):
        if i == j:
            return m[i, k] * m[i, l]
        return m[i, k] * m[j, l] + m[j, k] * m[i, l]

    return sp.ImmutableMatrix([[coefficient(i, j, k, l) for (k, l) in basis] for (i, j) in basis])


def tensor_matrix(a: sp.MatrixBase, b: sp.MatrixBase) -> sp.ImmutableMatrix:
    """Row-major Kronecker product A (x) B."""
    return sp.ImmutableMatrix(sp.kronecker_product(a, b))


@lru_cache(maxsize=None)
def enumerate_dominant(n: int, j: int) -> Tuple[DominantWeight, ...]:
    """Partitions of j into at most n parts, padded to length n, lexicographically descending."""
    if n < 1 or j < 0:
        raise ValueError("need n >= 1 and j >= 0")
    return tuple(DominantWeight(p) for p in _partitions_up_to(j, n, j))
