"""Closed-form statistics of a first-order two-state Markov chain.

State A is coded 1 and state B is coded 0.  The chain is driven by the two
self-transition probabilities p = P(A -> A) and q = P(B -> B); the cross
transitions follow as P(B -> A) = 1 - q and P(A -> B) = 1 - p.  Everything
in this module is exact algebra in these two numbers (plus the initial
probability p1 of starting in A); no simulation is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ParameterError(ValueError):
    """A chain parameter lies outside its valid domain."""


def _check_open_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ParameterError(
            f"{name} must lie strictly inside (0, 1), got {value!r}"
        )


def stationary_frequency(p: float, q: float) -> float:
    """Long-run frequency of state A, (1-q) / (2-(p+q))."""
    return (1.0 - q) / (2.0 - (p + q))


@dataclass(frozen=True)
class MarkovParams:
    """Defining parameters of the chain.

    p and q must lie strictly inside (0, 1); the endpoint chains (frozen or
    strictly alternating) are excluded.  p1 is the probability that the
    first measurement yields state A; when omitted it defaults to the
    stationary frequency, so simulated statistics are transient-free.
    """

    p: float
    q: float
    p1: float | None = None

    def __post_init__(self):
        _check_open_unit("p", self.p)
        _check_open_unit("q", self.q)
        if self.p1 is None:
            object.__setattr__(self, "p1", stationary_frequency(self.p, self.q))
        elif not 0.0 <= self.p1 <= 1.0:
            raise ParameterError(f"p1 must lie in [0, 1], got {self.p1!r}")


@dataclass(frozen=True)
class DerivedParams:
    """Summary quantities derived from (p, q).

    a      memory eigenvalue p + q - 1, in (-1, 1); geometric decay rate of
           correlations and of the influence of the initial state.
    pinf   asymptotic frequency of state A.
    nu     factor multiplying the memory-free standard deviation of the
           observed proportion; nu > 1 iff p + q > 1 (clustering), nu < 1
           iff p + q < 1 (dispersion).
    nu_sq  nu squared, (p+q) / (2-(p+q)) = (1+a) / (1-a).
    """

    a: float
    pinf: float
    nu: float
    nu_sq: float


def derive(params: MarkovParams) -> DerivedParams:
    """Compute the derived summary of a parameter set (exact algebra)."""
    p, q = params.p, params.q
    a = p + q - 1.0
    pinf = stationary_frequency(p, q)
    nu_sq = (p + q) / (2.0 - (p + q))
    return DerivedParams(a=a, pinf=pinf, nu=math.sqrt(nu_sq), nu_sq=nu_sq)


def transition_matrix(params: MarkovParams) -> np.ndarray:
    """Column-stochastic one-step matrix; column j is the current state.

    Row/column order is (A, B), so M[0, 0] = p and M[0, 1] = 1 - q, and a
    probability column vector evolves as v' = M v.
    """
    p, q = params.p, params.q
    return np.array([[p, 1.0 - q], [1.0 - p, q]], dtype=float)


def _check_step_count(n: int, minimum: int = 1) -> None:
    if not isinstance(n, (int, np.integer)) or n < minimum:
        raise ParameterError(f"n must be an integer >= {minimum}, got {n!r}")


def state_probability(params: MarkovParams, n: int) -> float:
    """Probability that the n-th measurement (n >= 1) yields state A.

    Closed form of the recursion x_n = a * x_(n-1) + (1 - q):
    a^(n-1) * (p1 - pinf) + pinf.
    """
    _check_step_count(n)
    d = derive(params)
    return d.a ** (n - 1) * (params.p1 - d.pinf) + d.pinf


def mean_frequency(params: MarkovParams, n: int) -> float:
    """Expected proportion of A among the first n measurements.

    pinf + (p1 - pinf)/n * (1 - a^n)/(1 - a); tends to pinf as n grows.
    """
    _check_step_count(n)
    d = derive(params)
    return d.pinf + (params.p1 - d.pinf) / n * (1.0 - d.a**n) / (1.0 - d.a)


def n_step_self_transitions(params: MarkovParams, n: int) -> tuple[float, float]:
    """(P(A after n steps | start A), P(A after n steps | start B)).

    a^n * (1 - pinf) + pinf and pinf * (1 - a^n); the pair matches the
    first row of the n-th power of the transition matrix, with the
    initial conditions (1, 0) at n = 0 and both components tending to
    pinf.
    """
    _check_step_count(n, minimum=0)
    d = derive(params)
    an = d.a**n
    return an * (1.0 - d.pinf) + d.pinf, d.pinf * (1.0 - an)


def std_of_proportion(params: MarkovParams, n: int) -> float:
    """Asymptotic standard deviation of the observed proportion of A.

    Factorizes as sigma0 * nu with sigma0 = sqrt(pinf*(1-pinf)/n), the
    memory-free value.
    """
    _check_step_count(n)
    d = derive(params)
    return math.sqrt(d.pinf * (1.0 - d.pinf) / n) * d.nu


def lag1_correlation_symmetric(p: float) -> float:
    """First-neighbor correlation of the spin variable when p = q: 2p - 1."""
    _check_open_unit("p", p)
    return 2.0 * p - 1.0
