"""Gauss-Legendre quadrature rules on [0, 1].

Every stage integral in both integrator families is discretized with one of
these rules.  Only symmetric rules are allowed: node/weight symmetry about
1/2 is what makes the resulting one-step maps time-symmetric, so asymmetric
input is rejected outright rather than silently degrading the methods.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError

MAX_NODES = 20
SYMMETRY_TOL = 1e-14
WEIGHT_SUM_TOL = 1e-14
EXACTNESS_TOL = 1e-13
NEWTON_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes, weights and exactness degree of a rule on [0, 1].

    Construction validates the full contract: nodes strictly increasing in
    [0, 1], positive weights summing to one, symmetry about 1/2, and exact
    integration of monomials up to ``exactness_degree``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=float)).copy()
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float)).copy()
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise DimensionError("nodes and weights must be 1-D arrays of equal length")
        if nodes.size == 0:
            raise ConfigurationError("a quadrature rule needs at least one node")
        if np.any(nodes < 0.0) or np.any(nodes > 1.0):
            raise ConfigurationError("all nodes must lie in [0, 1]")
        if np.any(np.diff(nodes) <= 0.0):
            raise ConfigurationError("nodes must be strictly increasing")
        if np.any(weights <= 0.0):
            raise ConfigurationError("all weights must be positive")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ConfigurationError("weights must sum to 1")
        if (
            np.max(np.abs(nodes + nodes[::-1] - 1.0)) > SYMMETRY_TOL
            or np.max(np.abs(weights - weights[::-1])) > SYMMETRY_TOL
        ):
            raise ConfigurationError(
                "only rules symmetric about 1/2 are supported; asymmetric rules "
                "would break the time symmetry of the integrators"
            )
        degree = int(self.exactness_degree)
        object.__setattr__(self, "exactness_degree", degree)
        for p in range(degree + 1):
            if abs(weights @ nodes**p - 1.0 / (p + 1)) > EXACTNESS_TOL:
                raise ConfigurationError(
                    f"rule is not exact for x^{p} but claims exactness degree {degree}"
                )

    @property
    def m(self) -> int:
        """Node count."""
        return self.nodes.size

    def integrate(self, samples) -> float:
        """Weighted sum of samples taken at the nodes."""
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (self.m,):
            raise DimensionError(
                f"expected {self.m} samples, got array of shape {samples.shape}"
            )
        return float(self.weights @ samples)

    def __repr__(self):
        return f"QuadratureRule(m={self.m}, exactness_degree={self.exactness_degree})"


def _legendre_pair(n: int, y):
    """Value and d/dy derivative of the standard Legendre P_n on [-1, 1]."""
    val_prev = np.ones_like(y)
    der_prev = np.zeros_like(y)
    if n == 0:
        return val_prev, der_prev
    val, der = y.copy(), np.ones_like(y)
    for k in range(1, n):
        val_next = ((2 * k + 1) * y * val - k * val_prev) / (k + 1)
        der_next = ((2 * k + 1) * (val + y * der) - k * der_prev) / (k + 1)
        val_prev, der_prev = val, der
        val, der = val_next, der_next
    return val, der


def gauss_legendre_rule(m: int) -> QuadratureRule:
    """The m-point Gauss-Legendre rule mapped to [0, 1].

    Nodes are found by Newton iteration from the Chebyshev-style initial
    guesses, converged to 1e-15 and then symmetrized pairwise so the
    symmetry identities hold to machine precision.  Exactness degree 2m-1.
    """
    m = int(m)
    if not 1 <= m <= MAX_NODES:
        raise ConfigurationError(f"node count must be between 1 and {MAX_NODES}, got {m}")
    k = np.arange(1, m + 1)
    y = np.cos(np.pi * (4 * k - 1) / (4 * m + 2))
    for _ in range(100):
        val, der = _legendre_pair(m, y)
        step = val / der
        y -= step
        if np.max(np.abs(step)) < NEWTON_TOL:
            break
    # one polishing iteration past the tolerance check
    val, der = _legendre_pair(m, y)
    y -= val / der
    y = np.sort(y)
    y = 0.5 * (y - y[::-1])
    _, der = _legendre_pair(m, y)
    w = 2.0 / ((1.0 - y**2) * der**2)
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(0.5 * (y + 1.0), 0.5 * w, 2 * m - 1)
