"""
Based root data of GSpin_{2n+1}, split and quasi-split GSpin_{2n}, and GL_n.

Characters and cocharacters are dense integer vectors of length n+1 in the
bases e_0, ..., e_n and e*_0, ..., e*_n; index 0 is always the e_0 generator.
GL_n is realized inside the same lattices with e_0 unused by its roots.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Tuple

from .error_handler import CaseMismatch, InvalidRank, NotARoot, NotQuasiSplit, RankMismatch
from .logging_system import LogCategory, get_logging_system
from .rational import RationalLike, to_fraction

if TYPE_CHECKING:
    from .lfactors import IdentityCase

logger = get_logging_system().get_logger(LogCategory.ROOT_DATA)

WEYL_ENUMERATION_LIMIT = 6


class Family(Enum):
    GSPIN_ODD = "GSpinOdd"
    GSPIN_EVEN_SPLIT = "GSpinEvenSplit"
    GSPIN_EVEN_QUASI_SPLIT = "GSpinEvenQuasiSplit"
    GL = "GL"


class Side(Enum):
    CHAR = "char"
    COCHAR = "cochar"


class ModulusRole(Enum):
    DELTA_G = "DeltaG"
    DELTA_H = "DeltaH"
    DELTA_GL = "DeltaGL"


@dataclass(frozen=True)
class GroupKind:
    family: Family
    rank: int
    a: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, 'family', Family(self.family))
        if self.rank < 1:
            raise InvalidRank(f"rank must be positive, got {self.rank}", rank=self.rank)
        if self.family is Family.GSPIN_EVEN_QUASI_SPLIT:
            if self.a is None or to_fraction(self.a) == 0:
                raise InvalidRank("quasi-split GSpin needs a nonzero square-class datum a")
            if self.rank < 2:
                raise InvalidRank("quasi-split GSpin_2n needs n >= 2", rank=self.rank)
            object.__setattr__(self, 'a', to_fraction(self.a))
        elif self.a is not None:
            raise InvalidRank(f"{self.family.value} takes no square-class datum")

    @classmethod
    def gspin_odd(cls, n: int) -> 'GroupKind':
        return cls(Family.GSPIN_ODD, n)

    @classmethod
    def gspin_even(cls, n: int) -> 'GroupKind':
        return cls(Family.GSPIN_EVEN_SPLIT, n)

    @classmethod
    def gspin_quasi_split(cls, n: int, a: RationalLike) -> 'GroupKind':
        return cls(Family.GSPIN_EVEN_QUASI_SPLIT, n, to_fraction(a))

    @classmethod
    def gl(cls, n: int) -> 'GroupKind':
        return cls(Family.GL, n)

    @property
    def name(self) -> str:
        n = self.rank
        if self.family is Family.GSPIN_ODD:
            return f"GSpin_{2 * n + 1}"
        if self.family is Family.GSPIN_EVEN_SPLIT:
            return f"GSpin_{2 * n}"
        if self.family is Family.GSPIN_EVEN_QUASI_SPLIT:
            return f"GSpin^{self.a}_{2 * n}"
        return f"GL_{n}"

    def split_form(self) -> 'GroupKind':
        if self.family is Family.GSPIN_EVEN_QUASI_SPLIT:
            return GroupKind(Family.GSPIN_EVEN_SPLIT, self.rank)
        return self


@dataclass(frozen=True)
class LatticeVector:
    coefficients: Tuple[int, ...]
    side: Side = Side.CHAR

    def __post_init__(self):
        object.__setattr__(self, 'coefficients', tuple(int(c) for c in self.coefficients))
        object.__setattr__(self, 'side', Side(self.side))
        if len(self.coefficients) < 1:
            raise RankMismatch("lattice vectors carry at least the e_0 coordinate")

    @classmethod
    def zero(cls, rank: int, side: Side = Side.CHAR) -> 'LatticeVector':
        return cls((0,) * (rank + 1), side)

    @classmethod
    def basis(cls, rank: int, index: int, side: Side = Side.CHAR) -> 'LatticeVector':
        coefficients = [0] * (rank + 1)
        coefficients[index] = 1
        return cls(tuple(coefficients), side)

    @classmethod
    def of(cls, rank: int, terms: Dict[int, int], side: Side = Side.CHAR) -> 'LatticeVector':
        """Build sum(c * e_i) from {i: c}."""
        coefficients = [0] * (rank + 1)
        for index, c in terms.items():
            coefficients[index] += c
        return cls(tuple(coefficients), side)

    @property
    def rank(self) -> int:
        return len(self.coefficients) - 1

    def _check(self, other: 'LatticeVector') -> None:
        if len(other.coefficients) != len(self.coefficients):
            raise RankMismatch(f"rank {self.rank} vs rank {other.rank}")
        if other.side is not self.side:
            raise RankMismatch("cannot combine characters with cocharacters")

    def __add__(self, other: 'LatticeVector') -> 'LatticeVector':
        self._check(other)
        return LatticeVector(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)), self.side)

    def __sub__(self, other: 'LatticeVector') -> 'LatticeVector':
        self._check(other)
        return LatticeVector(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)), self.side)

    def __neg__(self) -> 'LatticeVector':
        return LatticeVector(tuple(-a for a in self.coefficients), self.side)

    def scale(self, factor: int) -> 'LatticeVector':
        return LatticeVector(tuple(factor * a for a in self.coefficients), self.side)

    def __str__(self) -> str:
        star = "*" if self.side is Side.COCHAR else ""
        terms = []
        # e_0 goes last, as in e1*+e2*-e0*
        order = list(range(1, len(self.coefficients))) + [0]
        for i in order:
            c = self.coefficients[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            size = "" if abs(c) == 1 else str(abs(c))
            terms.append(f"{sign}{size}e{i}{star}")
        if not terms:
            return "0"
        text = "".join(terms)
        return text[1:] if text.startswith("+") else text


@dataclass(frozen=True)
class RootDatum:
    kind: GroupKind
    roots: Tuple[LatticeVector, ...]
    coroots: Tuple[LatticeVector, ...]
    simple_roots: Tuple[LatticeVector, ...]
    simple_coroots: Tuple[LatticeVector, ...]

    @property
    def rank(self) -> int:
        return self.kind.rank

    @property
    def coroot_map(self) -> Dict[LatticeVector, LatticeVector]:
        return dict(zip(self.roots, self.coroots))


@dataclass(frozen=True)
class WeylElement:
    """(p, epsilon): p lists the images p(1), ..., p(n); epsilon_k is the sign attached to index k."""
    permutation: Tuple[int, ...]
    signs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'permutation', tuple(int(i) for i in self.permutation))
        object.__setattr__(self, 'signs', tuple(int(s) for s in self.signs))
        n = len(self.permutation)
        if sorted(self.permutation) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.permutation}")
        if len(self.signs) != n or any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"bad sign vector {self.signs}")

    @classmethod
    def identity(cls, n: int) -> 'WeylElement':
        return cls(tuple(range(1, n + 1)), (1,) * n)

    @property
    def rank(self) -> int:
        return len(self.permutation)

    def is_admissible(self, family: Family) -> bool:
        if family is Family.GL:
            return all(s == 1 for s in self.signs)
        if family is Family.GSPIN_ODD:
            return True
        product = 1
        for s in self.signs:
            product *= s
        return product == 1


@dataclass(frozen=True)
class ModulusExponent:
    """Exponent e with modulus value q^(-e) at the torus element of a dominant weight."""
    value: Fraction


@dataclass(frozen=True)
class RelativeRootDatum:
    """k-rational data of a quasi-split GSpin_2n, of type B_(n-1)."""
    kind: GroupKind
    simple_roots: Tuple[LatticeVector, ...]
    simple_coroots: Tuple[LatticeVector, ...]
    rational_characters: Tuple[LatticeVector, ...]
    rational_cocharacters: Tuple[LatticeVector, ...]


def _char(n: int, terms: Dict[int, int]) -> LatticeVector:
    return LatticeVector.of(n, terms, Side.CHAR)


def _cochar(n: int, terms: Dict[int, int]) -> LatticeVector:
    return LatticeVector.of(n, terms, Side.COCHAR)


def _root_pairs(kind: GroupKind) -> List[Tuple[LatticeVector, LatticeVector]]:
    """Positive (root, coroot) pairs; negatives follow by sign."""
    n = kind.rank
    pairs = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        pairs.append((_char(n, {i: 1, j: -1}), _cochar(n, {i: 1, j: -1})))
        if kind.family is not Family.GL:
            pairs.append((_char(n, {i: 1, j: 1}), _cochar(n, {i: 1, j: 1, 0: -1})))
    if kind.family is Family.GSPIN_ODD:
        for i in range(1, n + 1):
            pairs.append((_char(n, {i: 1}), _cochar(n, {i: 2, 0: -1})))
    return pairs


def _simple_pairs(kind: GroupKind) -> List[Tuple[LatticeVector, LatticeVector]]:
    n = kind.rank
    pairs = [(_char(n, {i: 1, i + 1: -1}), _cochar(n, {i: 1, i + 1: -1})) for i in range(1, n)]
    if kind.family is Family.GSPIN_ODD:
        pairs.append((_char(n, {n: 1}), _cochar(n, {n: 2, 0: -1})))
    elif kind.family in (Family.GSPIN_EVEN_SPLIT, Family.GSPIN_EVEN_QUASI_SPLIT) and n >= 2:
        pairs.append((_char(n, {n - 1: 1, n: 1}), _cochar(n, {n - 1: 1, n: 1, 0: -1})))
    return pairs


@lru_cache(maxsize=None)
def build_root_datum(kind: GroupKind) -> RootDatum:
    """
    Full based root datum of the given kind.

    Rank-one even GSpin is the torus GSpin_2 and GL_1 is a torus; both have
    no roots. The quasi-split form stores the split datum, the Galois action
    lives in galois_act.
    """
    if not isinstance(kind, GroupKind):
        raise InvalidRank(f"not a group kind: {kind!r}")
    positive = _root_pairs(kind)
    roots = tuple(r for r, _ in positive) + tuple(-r for r, _ in positive)
    coroots = tuple(c for _, c in positive) + tuple(-c for _, c in positive)
    simple = _simple_pairs(kind)
    datum = RootDatum(
        kind=kind,
        roots=roots,
        coroots=coroots,
        simple_roots=tuple(r for r, _ in simple),
        simple_coroots=tuple(c for _, c in simple),
    )
    logger.debug(f"built root datum of {kind.name}: {len(roots)} roots, {len(simple)} simple")
    return datum


def coroot_of(datum: RootDatum, root: LatticeVector) -> LatticeVector:
    """alpha -> alpha^vee under the datum's bijection."""
    coroot = datum.coroot_map.get(root)
    if coroot is None or root.side is not Side.CHAR:
        raise NotARoot(f"{root} is not a root of {datum.kind.name}")
    return coroot


def pairing(x: LatticeVector, y: LatticeVector) -> int:
    """Standard pairing <x, y> = sum over indices 0..n of x_i y_i."""
    if len(x.coefficients) != len(y.coefficients):
        raise RankMismatch(f"pairing of rank {x.rank} with rank {y.rank}")
    if x.side is not Side.CHAR or y.side is not Side.COCHAR:
        raise RankMismatch("pairing takes a character and a cocharacter")
    return sum(a * b for a, b in zip(x.coefficients, y.coefficients))


def positive_roots(datum: RootDatum) -> Tuple[LatticeVector, ...]:
    """Roots whose first nonzero coordinate among e_1..e_n is positive."""
    def is_positive(root):
        return next(c for c in root.coefficients[1:] if c != 0) > 0
    return tuple(r for r in datum.roots if is_positive(r))


def half_sum_positive(datum: RootDatum) -> LatticeVector:
    """2*rho, the sum of the positive roots."""
    total = LatticeVector.zero(datum.rank, Side.CHAR)
    for root in positive_roots(datum):
        total = total + root
    return total


def cartan_matrix(datum: RootDatum) -> Tuple[Tuple[int, ...], ...]:
    """(<alpha_i, alpha_j^vee>)_{i,j} over the simple roots in order."""
    return tuple(
        tuple(pairing(alpha, coroot) for coroot in datum.simple_coroots)
        for alpha in datum.simple_roots
    )


def expected_cartan_matrix(kind: GroupKind) -> Tuple[Tuple[int, ...], ...]:
    """Cartan matrix of type B_n, D_n or A_(n-1) in the same convention as cartan_matrix."""
    n = kind.rank
    if kind.family is Family.GL:
        size = n - 1
    elif kind.family is Family.GSPIN_ODD:
        size = n
    else:
        size = n if n >= 2 else 0
    a = [[2 if i == j else 0 for j in range(size)] for i in range(size)]
    if kind.family in (Family.GL, Family.GSPIN_ODD):
        for i in range(size - 1):
            a[i][i + 1] = a[i + 1][i] = -1
        if kind.family is Family.GSPIN_ODD and size >= 2:
            a[size - 2][size - 1] = -2
    elif size >= 2:
        for i in range(size - 2):
            a[i][i + 1] = a[i + 1][i] = -1
        if size >= 3:
            a[size - 3][size - 1] = a[size - 1][size - 3] = -1
    return tuple(tuple(row) for row in a)


def weyl_act(datum: RootDatum, w: WeylElement, v: LatticeVector) -> LatticeVector:
    """
    Action of (p, epsilon) on X or X^vee:

        e_i   -> epsilon_p(i) e_p(i)
        e_0   -> e_0 + sum over epsilon_k = -1 of e_k
        e*_i  -> e*_p(i), or e*_0 - e*_p(i) when epsilon_p(i) = -1
        e*_0  -> e*_0
    """
    n = datum.rank
    if w.rank != n or v.rank != n:
        raise RankMismatch(f"Weyl element of rank {w.rank} and vector of rank {v.rank} on {datum.kind.name}")
    c = v.coefficients
    out = [0] * (n + 1)
    if v.side is Side.CHAR:
        out[0] = c[0]
        for k in range(1, n + 1):
            if w.signs[k - 1] == -1:
                out[k] += c[0]
        for i in range(1, n + 1):
            target = w.permutation[i - 1]
            out[target] += w.signs[target - 1] * c[i]
    else:
        out[0] = c[0]
        for i in range(1, n + 1):
            target = w.permutation[i - 1]
            if w.signs[target - 1] == 1:
                out[target] += c[i]
            else:
                out[0] += c[i]
                out[target] -= c[i]
    return LatticeVector(tuple(out), v.side)


def simple_reflection(datum: RootDatum, index: int) -> WeylElement:
    """The (p, epsilon) form of the reflection in the index-th simple root (0-based)."""
    n = datum.rank
    if not datum.simple_roots:
        raise InvalidRank(f"{datum.kind.name} has no simple roots")
    if not 0 <= index < len(datum.simple_roots):
        raise InvalidRank(f"simple root index {index} out of range")
    perm = list(range(1, n + 1))
    signs = [1] * n
    family = datum.kind.family
    if index < n - 1:
        perm[index], perm[index + 1] = perm[index + 1], perm[index]
    elif family is Family.GSPIN_ODD:
        signs[n - 1] = -1
    else:
        perm[n - 2], perm[n - 1] = perm[n - 1], perm[n - 2]
        signs[n - 2] = signs[n - 1] = -1
    return WeylElement(tuple(perm), tuple(signs))


def reflect(datum: RootDatum, root: LatticeVector, v: LatticeVector) -> LatticeVector:
    """s_alpha(v) = v - <v, alpha^vee> alpha on characters, v - <alpha, v> alpha^vee on cocharacters."""
    coroot = coroot_of(datum, root)
    if v.side is Side.CHAR:
        return v - root.scale(pairing(v, coroot))
    return v - coroot.scale(pairing(root, v))


def weyl_group_elements(datum: RootDatum) -> List[WeylElement]:
    """All admissible (p, epsilon) for the datum's family."""
    n = datum.rank
    if n > WEYL_ENUMERATION_LIMIT:
        raise InvalidRank(f"Weyl group enumeration is limited to rank {WEYL_ENUMERATION_LIMIT}")
    family = datum.kind.family
    sign_choices = [(1,) * n] if family is Family.GL else itertools.product((1, -1), repeat=n)
    elements = []
    for signs in sign_choices:
        for perm in itertools.permutations(range(1, n + 1)):
            w = WeylElement(perm, signs)
            if w.is_admissible(family):
                elements.append(w)
    return elements


def galois_act(datum: RootDatum, v: LatticeVector) -> LatticeVector:
    """
    The nontrivial Galois element on X and X^vee of the quasi-split form:
    e_0 -> e_0 + e_n, e_n -> -e_n, e*_n -> -e*_n + e*_0, other generators fixed.
    """
    if datum.kind.family is not Family.GSPIN_EVEN_QUASI_SPLIT:
        raise NotQuasiSplit(f"{datum.kind.name} carries no Galois action")
    n = datum.rank
    if v.rank != n:
        raise RankMismatch(f"vector of rank {v.rank} on {datum.kind.name}")
    c = list(v.coefficients)
    if v.side is Side.CHAR:
        c[n] = c[0] - c[n]
    else:
        c[0] = c[0] + c[n]
        c[n] = -c[n]
    return LatticeVector(tuple(c), v.side)


def relative_root_datum(datum: RootDatum) -> RelativeRootDatum:
    """Relative B_(n-1) system and the k-rational lattices of a quasi-split GSpin_2n."""
    if datum.kind.family is not Family.GSPIN_EVEN_QUASI_SPLIT:
        raise NotQuasiSplit(f"{datum.kind.name} is split")
    n = datum.rank
    simple = [_char(n, {i: 1, i + 1: -1}) for i in range(1, n - 1)] + [_char(n, {n - 1: 1})]
    simple_co = [_cochar(n, {i: 1, i + 1: -1}) for i in range(1, n - 1)] + [_cochar(n, {n - 1: 2, 0: -1})]
    characters = [_char(n, {i: 1}) for i in range(1, n)] + [_char(n, {n: 1, 0: 2})]
    cocharacters = [_cochar(n, {i: 1}) for i in range(0, n)]
    return RelativeRootDatum(datum.kind, tuple(simple), tuple(simple_co),
                             tuple(characters), tuple(cocharacters))


def dual_group_name(kind: GroupKind) -> str:
    n = kind.rank
    if kind.family is Family.GSPIN_ODD:
        return f"GSp_{2 * n}(C)"
    if kind.family is Family.GL:
        return f"GL_{n}(C)"
    return f"GSO_{2 * n}(C)"


def low_rank_isomorphism(kind: GroupKind) -> Optional[str]:
    """Isomorphism type of the degenerate GSpin groups, None otherwise."""
    if kind.family is Family.GSPIN_EVEN_SPLIT and kind.rank == 1:
        return "GL_1 x GL_1"
    if kind.family is Family.GSPIN_ODD and kind.rank == 1:
        return "GL_2"
    return None


# Modulus characters

def _weight_parts(delta) -> Tuple[int, ...]:
    return tuple(getattr(delta, 'parts', delta))


def _explicit_exponent(kind: GroupKind, parts: Sequence[int]) -> Fraction:
    n = kind.rank
    if kind.family is Family.GL:
        top = n + 1
    elif kind.family is Family.GSPIN_ODD:
        top = 2 * n + 1
    else:
        top = 2 * n
    # |t_1^(top-2) t_2^(top-4) ...|
    return Fraction(sum((top - 2 * i) * k for i, k in enumerate(parts, start=1)))


def _root_datum_exponent(kind: GroupKind, parts: Sequence[int]) -> Fraction:
    # absolute roots of the quasi-split form are the split ones
    datum = build_root_datum(kind.split_form())
    padded = tuple(parts) + (0,) * (kind.rank - len(parts))
    cocharacter = LatticeVector((0,) + padded, Side.COCHAR)
    return Fraction(pairing(half_sum_positive(datum), cocharacter))


def modulus_exponent(role: ModulusRole, case: 'IdentityCase', delta,
                     method: str = "explicit") -> ModulusExponent:
    """
    Exponent e of the modulus character at the torus element of delta.

    method="explicit" uses the monomial exponents (for instance
    sum (2n-2i) k_i for G = GSpin_2n); method="root_datum" computes
    <2 rho, sum k_i e*_i> from the root datum. The two always agree.
    """
    role = ModulusRole(role)
    if not case.is_case_a:
        raise CaseMismatch(f"modulus characters are only used for case A, not {case.family.value}")
    parts = _weight_parts(delta)
    if len(parts) != case.n:
        raise CaseMismatch(f"weight {parts} must have {case.n} parts for {case.key}")
    kind = case.group_kind(role)
    if len(parts) > kind.rank:
        raise CaseMismatch(f"weight {parts} does not fit {kind.name}")
    if method == "explicit":
        value = _explicit_exponent(kind, parts)
    elif method == "root_datum":
        value = _root_datum_exponent(kind, parts)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ModulusExponent(value)
