"""
Seeded random parameters.

Character values are distinct small primes raised to +-1, which keeps every
alternant regular and coefficient sizes bounded. chi0 is drawn as a square u^2.
"""

import random
from fractions import Fraction
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy as sp

from .characters import SimilitudeFamily
from .error_handler import InvalidRank
from .identity import (SweepTask, SymAlgInstance, verify_case_B_factorization, verify_symalg,
                       verify_unramified_identity)
from .lfactors import CaseFamily, IdentityCase
from .rational import diagonal
from .satake import UnramifiedData

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)
NON_SQUARES = (-1, 2, 3, 5, 6, 7, -3, 10)
QUASI_SPLIT_T = (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(2), Fraction(3), Fraction(3, 2))


def make_rng(key: str, seed: int) -> random.Random:
    """A generator that depends only on (key, seed)."""
    return random.Random(f"{key}:{seed}")


class ParameterDraw:
    """Draws distinct primes from a shuffled pool, so values never collide within one instance."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.pool = list(PRIMES)
        rng.shuffle(self.pool)

    def prime(self) -> int:
        if not self.pool:
            raise InvalidRank("instance is too large for the prime pool")
        return self.pool.pop()

    def unit(self) -> Fraction:
        p = Fraction(self.prime())
        return p if self.rng.random() < 0.5 else 1 / p

    def units(self, count: int) -> Tuple[Fraction, ...]:
        return tuple(self.unit() for _ in range(count))

    def square(self) -> Fraction:
        return self.unit() ** 2


def random_gl_data(draw: ParameterDraw, n: int) -> UnramifiedData:
    return UnramifiedData(chi0=Fraction(1), chi=draw.units(n))


def random_split_data(draw: ParameterDraw, n: int) -> UnramifiedData:
    """(chi0, chi_1..chi_n) with chi0 = u^2."""
    chi0 = draw.square()
    return UnramifiedData(chi0=chi0, chi=draw.units(n))


def random_quasi_split_data(draw: ParameterDraw, n: int) -> UnramifiedData:
    """
    Data for GSpin_2n^a: chi_1..chi_(n-1), a non-square a and (alpha, beta) on the
    conic alpha^2 - a beta^2 = u^2, parametrized by a rational t.
    """
    if n < 2:
        raise InvalidRank("the quasi-split form needs n >= 2", n=n)
    u = draw.unit()
    a = Fraction(draw.rng.choice(NON_SQUARES))
    t = draw.rng.choice(QUASI_SPLIT_T)
    denominator = 1 - a * t * t
    alpha = u * (1 + a * t * t) / denominator
    beta = 2 * u * t / denominator
    return UnramifiedData(chi0=u * u, chi=draw.units(n - 1), a=a, alpha=alpha, beta=beta)


def random_case_a(case: IdentityCase, seed: int) -> Tuple[UnramifiedData, UnramifiedData]:
    """(pi data on H, tau data on GL_n)."""
    draw = ParameterDraw(make_rng(case.key, seed))
    if case.family is CaseFamily.A_EVEN_QUASI_SPLIT:
        pi_data = random_quasi_split_data(draw, case.m)
    else:
        pi_data = random_split_data(draw, case.m)
    return pi_data, random_gl_data(draw, case.n)


def random_case_b(case: IdentityCase, seed: int) -> Tuple[UnramifiedData, Fraction, Tuple[Fraction, ...]]:
    """(sigma data, omega, eigenvalues of t_tau on GL_m)."""
    draw = ParameterDraw(make_rng(case.key, seed))
    if case.family is CaseFamily.B_EVEN_QUASI_SPLIT:
        sigma = random_quasi_split_data(draw, case.n)
    else:
        sigma = random_split_data(draw, case.n)
    return sigma, sigma.chi0, draw.units(case.m)


def _small_int(rng: random.Random) -> int:
    return rng.randint(-2, 2)


def _unipotent_triangular(rng: random.Random, k: int) -> sp.Matrix:
    a = sp.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            a[i, j] = _small_int(rng)
    return a


def _levi_element(rng: random.Random, m: int) -> sp.Matrix:
    """diag(A, w A^-T w), which preserves both forms J."""
    a = _unipotent_triangular(rng, m)
    for i in range(m):
        a[i, i] = rng.choice((1, -1, 2))
    w = sp.Matrix(m, m, lambda i, j: 1 if i + j == m - 1 else 0)
    return sp.diag(a, w * a.inv().T * w)


def _siegel_unipotent(rng: random.Random, m: int, symplectic: bool) -> sp.Matrix:
    """[[I, wS], [0, I]] with S symmetric (symplectic) or skew (orthogonal)."""
    s = sp.zeros(m, m)
    for i in range(m):
        for j in range(i, m):
            if i == j:
                s[i, j] = _small_int(rng) if symplectic else 0
            else:
                s[i, j] = _small_int(rng)
                s[j, i] = s[i, j] if symplectic else -s[i, j]
    w = sp.Matrix(m, m, lambda i, j: 1 if i + j == m - 1 else 0)
    upper = sp.eye(2 * m)
    upper[:m, m:] = w * s
    return upper


def random_symalg_instance(family: SimilitudeFamily, m: int, n: int, r: int, seed: int) -> SymAlgInstance:
    """
    g1 = P diag(t, mu/t) P^-1 with P in Sp_2m or SO_2m from a Levi element and a
    Siegel unipotent; g2 = Q diag(y) Q^-1 with Q unipotent integral.
    """
    family = SimilitudeFamily(family)
    symplectic = family is SimilitudeFamily.GSP
    draw = ParameterDraw(make_rng(f"symalg:{family.value}:m={m}:n={n}:r={r}", seed))
    mu = draw.square()
    torus = draw.units(m)
    tau = draw.units(n)

    d = diagonal(torus + tuple(mu / t for t in reversed(torus)))
    p = _levi_element(draw.rng, m) * _siegel_unipotent(draw.rng, m, symplectic)
    g1 = sp.ImmutableMatrix(p * d * p.inv())
    q = _unipotent_triangular(draw.rng, n)
    g2 = sp.ImmutableMatrix(q * diagonal(tau) * q.inv())
    return SymAlgInstance(g1, mu, g2, r, family, torus, tau)


def symalg_shapes(family: SimilitudeFamily, max_m: int, max_n: int) -> List[Tuple[int, int]]:
    """(m, n) pairs allowed by the decomposition: n <= m, or n < m for GSO."""
    strict = SimilitudeFamily(family) is SimilitudeFamily.GSO
    return [(m, n) for m in range(1, max_m + 1) for n in range(1, max_n + 1)
            if (n < m if strict else n <= m)]


# Sweep grids

def _verify_random_case_a(case: IdentityCase, seed: int, order: int):
    pi_data, tau_data = random_case_a(case, seed)
    report = verify_unramified_identity(case, pi_data, tau_data, order)
    report.parameters["seed"] = seed
    return report


def _verify_random_case_b(case: IdentityCase, seed: int, order: int):
    sigma, omega, tau = random_case_b(case, seed)
    report = verify_case_B_factorization(case, sigma, omega, tau, order)
    report.parameters["seed"] = seed
    return report


def _verify_random_symalg(family: SimilitudeFamily, m: int, n: int, r: int, seed: int):
    report = verify_symalg(random_symalg_instance(family, m, n, r, seed))
    report.parameters["seed"] = seed
    return report


def case_tasks(case: IdentityCase, seeds: Sequence[int], order: int) -> List[SweepTask]:
    runner = _verify_random_case_a if case.is_case_a else _verify_random_case_b
    return [SweepTask(f"{case.key}:seed={seed:04d}", partial(runner, case, seed, order)) for seed in seeds]


def symalg_task(family: SimilitudeFamily, m: int, n: int, r: int, seed: int) -> SweepTask:
    family = SimilitudeFamily(family)
    key = f"symalg:{family.value}:m={m}:n={n}:r={r}:seed={seed:04d}"
    return SweepTask(key, partial(_verify_random_symalg, family, m, n, r, seed))


def symalg_tasks(family: SimilitudeFamily, max_m: int, max_n: int, max_r: int,
                 seeds: Sequence[int]) -> List[SweepTask]:
    return [symalg_task(family, m, n, r, seed)
            for m, n in symalg_shapes(family, max_m, max_n)
            for r in range(max_r + 1)
            for seed in seeds]


def grid_tasks(grid: Dict[str, Any], base_seed: int = 0, order: Optional[int] = None) -> List[SweepTask]:
    """
    Expand a sweep grid from the configuration into tasks. Each entry names a
    check ("unramified", "case-b" or "symalg"), its shapes and a seed count.
    """
    order = grid.get("order", 8) if order is None else order
    tasks: List[SweepTask] = []
    for entry in grid["entries"]:
        seeds = range(base_seed, base_seed + entry.get("seeds", 1))
        if entry["check"] == "symalg":
            tasks.extend(symalg_tasks(entry["family"], entry["max_m"], entry["max_n"], entry["max_r"], seeds))
            continue
        for n, m in entry["ranks"]:
            tasks.extend(case_tasks(IdentityCase(CaseFamily(entry["case"]), n, m), seeds, order))
    return tasks
