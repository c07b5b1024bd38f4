"""Basis tests: every expected value comes from an independent route.

Closed forms for low degrees are written out by hand from the monomial
expansions (l1 = sqrt(3)(2x-1), l2 = sqrt(5)(6x^2-6x+1)); the general
recurrence is cross-checked against the exact binomial-sum expansion, and
antiderivatives against central finite differences.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from varint import (
    BasisIndexError,
    ConfigurationError,
    LegendreBasis,
    gauss_legendre_rule,
    shifted_legendre,
    shifted_legendre_antiderivative,
    shifted_legendre_derivative,
)

RNG = np.random.default_rng(2024)


def monomial_expansion(j, x):
    """Independent oracle: l_j(x) = sqrt(2j+1) sum_k (-1)^(j-k) C(j,k) C(j+k,k) x^k.

    The alternating integer coefficients reach ~7.6e5 by degree 10, so the sum
    is formed in exact rational arithmetic (a float x is an exact binary
    rational) and rounded once at the end.
    """
    total = Fraction(0)
    xf = Fraction(x)
    for k in range(j + 1):
        total += (-1) ** (j - k) * math.comb(j, k) * math.comb(j + k, k) * xf**k
    return math.sqrt(2 * j + 1) * float(total)


def test_degree_zero_is_one():
    basis = LegendreBasis(4)
    assert basis.eval(0, 0.73) == 1.0
    for x in RNG.uniform(-0.5, 1.5, size=10):
        assert basis.eval(0, x) == 1.0


def test_low_degree_closed_forms():
    basis = LegendreBasis(3)
    assert basis.eval(1, 1.0) == pytest.approx(math.sqrt(3.0), abs=1e-14)
    assert basis.eval(2, 0.5) == pytest.approx(-math.sqrt(5.0) / 2.0, abs=1e-14)
    x = 0.31
    assert basis.eval(1, x) == pytest.approx(math.sqrt(3.0) * (2 * x - 1), abs=1e-14)


def test_recurrence_matches_monomial_expansion():
    for j in range(11):
        for x in RNG.uniform(0.0, 1.0, size=20):
            assert shifted_legendre(j, x) == pytest.approx(
                monomial_expansion(j, x), abs=1e-12, rel=1e-12
            )


def test_antiderivative_values():
    basis = LegendreBasis(3)
    assert basis.antiderivative(0, 0.4) == pytest.approx(0.4, abs=1e-15)
    assert basis.antiderivative(1, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert basis.antiderivative(1, 0.5) == pytest.approx(-math.sqrt(3.0) / 4.0, abs=1e-14)


@pytest.mark.parametrize("s", [1, 2, 3, 6, 10])
def test_full_interval_integral_is_delta(s):
    basis = LegendreBasis(s)
    full = basis.antiderivative_all(1.0)
    assert abs(full[0] - 1.0) < 1e-14
    assert np.all(np.abs(full[1:]) < 1e-14)


def test_antiderivative_derivative_is_basis_value():
    # central differences recover l_j from a_{tau,j}
    basis = LegendreBasis(5)
    delta = 1e-5
    for j in range(basis.s):
        for tau in RNG.uniform(0.05, 0.95, size=10):
            fd = (basis.antiderivative(j, tau + delta) - basis.antiderivative(j, tau - delta)) / (
                2 * delta
            )
            assert fd == pytest.approx(basis.eval(j, tau), abs=1e-6)


def test_derivative_matches_finite_differences():
    basis = LegendreBasis(5)
    delta = 1e-6
    for j in range(basis.s):
        for x in RNG.uniform(0.05, 0.95, size=10):
            fd = (basis.eval(j, x + delta) - basis.eval(j, x - delta)) / (2 * delta)
            assert basis.derivative(j, x) == pytest.approx(fd, abs=1e-6, rel=1e-6)


def test_orthonormality_defect_exact_rule():
    assert LegendreBasis(1).orthonormality_defect(gauss_legendre_rule(1)) == 0.0
    assert LegendreBasis(3).orthonormality_defect(gauss_legendre_rule(3)) < 1e-13
    for s in range(1, 7):
        assert LegendreBasis(s).orthonormality_defect(gauss_legendre_rule(s)) < 1e-12


def test_orthonormality_defect_underresolved_rule():
    # one node cannot see degree-2 products: l_2(1/2)^2 alone already misses
    defect = LegendreBasis(3).orthonormality_defect(gauss_legendre_rule(1))
    assert defect > 0.1


def test_vectorized_evaluation_agrees_with_scalar():
    basis = LegendreBasis(4)
    xs = RNG.uniform(0.0, 1.0, size=7)
    table = basis.eval_all(xs)
    anti = basis.antiderivative_all(xs)
    for j in range(basis.s):
        for i, x in enumerate(xs):
            assert table[j, i] == pytest.approx(basis.eval(j, x), abs=1e-15)
            assert anti[j, i] == pytest.approx(basis.antiderivative(j, x), abs=1e-15)


def test_index_and_size_validation():
    basis = LegendreBasis(2)
    with pytest.raises(BasisIndexError):
        basis.eval(2, 0.5)
    with pytest.raises(BasisIndexError):
        basis.antiderivative(-1, 0.5)
    with pytest.raises(BasisIndexError):
        shifted_legendre(-1, 0.5)
    with pytest.raises(BasisIndexError):
        shifted_legendre_derivative(-2, 0.5)
    with pytest.raises(BasisIndexError):
        shifted_legendre_antiderivative(-1, 0.5)
    with pytest.raises(ConfigurationError):
        LegendreBasis(0)
    with pytest.raises(ConfigurationError):
        LegendreBasis(11)
