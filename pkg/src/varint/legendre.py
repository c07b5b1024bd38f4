"""Orthonormal shifted Legendre polynomials on the unit interval.

The degree-j member carries a sqrt(2j+1) scale factor so that the family is
orthonormal in L2([0,1]); degree 0 is identically one.  Values come from the
stable three-term recurrence, and running integrals from 0 to tau are exact
closed-form polynomials (no quadrature involved).  Both integrator families
build their stage expansions on this basis.
"""

from __future__ import annotations

import numpy as np

from .errors import BasisIndexError, ConfigurationError

#: Largest supported basis size; bigger stage systems become ill-conditioned
#: and nothing in the package needs them.
MAX_BASIS_SIZE = 10


def _standard_all(jmax: int, y):
    """Non-normalized Legendre values P_0..P_jmax at y in [-1, 1], stacked."""
    y = np.asarray(y, dtype=float)
    out = np.empty((jmax + 1,) + y.shape)
    out[0] = 1.0
    if jmax >= 1:
        out[1] = y
    for n in range(1, jmax):
        out[n + 1] = ((2 * n + 1) * y * out[n] - n * out[n - 1]) / (n + 1)
    return out


def _standard_pair_all(jmax: int, y):
    """Values and d/dy derivatives of P_0..P_jmax at y, both stacked."""
    y = np.asarray(y, dtype=float)
    val = np.empty((jmax + 1,) + y.shape)
    der = np.empty((jmax + 1,) + y.shape)
    val[0] = 1.0
    der[0] = 0.0
    if jmax >= 1:
        val[1] = y
        der[1] = 1.0
    for n in range(1, jmax):
        val[n + 1] = ((2 * n + 1) * y * val[n] - n * val[n - 1]) / (n + 1)
        der[n + 1] = ((2 * n + 1) * (val[n] + y * der[n]) - n * der[n - 1]) / (n + 1)
    return val, der


def _as_input_shape(x, values):
    return float(values) if np.ndim(x) == 0 else values


def shifted_legendre(j: int, x):
    """Value of the degree-j orthonormal shifted Legendre polynomial at x.

    Accepts scalar or array x; evaluation outside [0, 1] is permitted.
    """
    if j < 0:
        raise BasisIndexError(f"degree must be non-negative, got {j}")
    y = 2.0 * np.asarray(x, dtype=float) - 1.0
    values = np.sqrt(2.0 * j + 1.0) * _standard_all(j, y)[j]
    return _as_input_shape(x, values)


def shifted_legendre_derivative(j: int, x):
    """First derivative (with respect to x) of the degree-j basis polynomial."""
    if j < 0:
        raise BasisIndexError(f"degree must be non-negative, got {j}")
    y = 2.0 * np.asarray(x, dtype=float) - 1.0
    _, der = _standard_pair_all(j, y)
    # chain rule for the map x -> y = 2x - 1
    values = 2.0 * np.sqrt(2.0 * j + 1.0) * der[j]
    return _as_input_shape(x, values)


def shifted_legendre_antiderivative(i: int, tau):
    """Running integral of the degree-i basis polynomial from 0 to tau.

    Exact closed form: for i >= 1 the integral of the non-normalized shifted
    polynomial telescopes to (P_{i+1} - P_{i-1}) / (2(2i+1)), which after the
    orthonormal scaling gives (P_{i+1}(tau) - P_{i-1}(tau)) / (2 sqrt(2i+1)).
    At tau = 1 this vanishes identically for every i >= 1; for i = 0 the
    integral is tau itself.
    """
    if i < 0:
        raise BasisIndexError(f"degree must be non-negative, got {i}")
    t = np.asarray(tau, dtype=float)
    if i == 0:
        return _as_input_shape(tau, t.copy())
    val = _standard_all(i + 1, 2.0 * t - 1.0)
    values = (val[i + 1] - val[i - 1]) / (2.0 * np.sqrt(2.0 * i + 1.0))
    return _as_input_shape(tau, values)


class LegendreBasis:
    """The first s orthonormal shifted Legendre polynomials on [0, 1].

    Immutable after construction; shares freely across threads.
    """

    def __init__(self, s: int):
        s = int(s)
        if not 1 <= s <= MAX_BASIS_SIZE:
            raise ConfigurationError(
                f"basis size must be between 1 and {MAX_BASIS_SIZE}, got {s}"
            )
        self._s = s
        self._scale = np.sqrt(2.0 * np.arange(s) + 1.0)

    @property
    def s(self) -> int:
        return self._s

    def _check_index(self, j: int) -> int:
        j = int(j)
        if not 0 <= j < self._s:
            raise BasisIndexError(f"degree {j} outside basis range 0..{self._s - 1}")
        return j

    def eval(self, j: int, x):
        """Value of the degree-j member at x."""
        return shifted_legendre(self._check_index(j), x)

    def derivative(self, j: int, x):
        """Derivative of the degree-j member at x."""
        return shifted_legendre_derivative(self._check_index(j), x)

    def antiderivative(self, i: int, tau):
        """Running integral of the degree-i member from 0 to tau."""
        return shifted_legendre_antiderivative(self._check_index(i), tau)

    def eval_all(self, x):
        """All s values at x; shape (s,) + shape(x)."""
        y = 2.0 * np.asarray(x, dtype=float) - 1.0
        val = _standard_all(self._s - 1, y)
        return val * self._scale.reshape((self._s,) + (1,) * y.ndim)

    def derivative_all(self, x):
        """All s derivatives at x; shape (s,) + shape(x)."""
        y = 2.0 * np.asarray(x, dtype=float) - 1.0
        _, der = _standard_pair_all(self._s - 1, y)
        return 2.0 * der * self._scale.reshape((self._s,) + (1,) * y.ndim)

    def antiderivative_all(self, tau):
        """All s running integrals at tau; shape (s,) + shape(tau)."""
        t = np.asarray(tau, dtype=float)
        val = _standard_all(self._s, 2.0 * t - 1.0)
        out = np.empty((self._s,) + t.shape)
        out[0] = t
        for i in range(1, self._s):
            out[i] = (val[i + 1] - val[i - 1]) / (2.0 * np.sqrt(2.0 * i + 1.0))
        return out

    def orthonormality_defect(self, quad) -> float:
        """Worst deviation of the discretized Gram matrix from the identity.

        Evaluates sum_k w_k l_i(c_k) l_j(c_k) over the given quadrature rule
        and returns max |G - I|.  Meaningful as an orthonormality check only
        when the rule is exact through degree 2s-2; with an under-resolved
        rule the returned defect quantifies the aliasing error instead.
        """
        values = self.eval_all(quad.nodes)  # (s, m)
        gram = (values * quad.weights) @ values.T
        return float(np.max(np.abs(gram - np.eye(self._s))))

    def __repr__(self):
        return f"LegendreBasis(s={self._s})"
