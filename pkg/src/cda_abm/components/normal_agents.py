"""
Normal agents: background traders mixing fundamental, technical and noise
expectations, one share per order.
"""

import math
from typing import Optional

import numpy as np

from cda_abm.core.types import NormalAgentParams, OrderIntent, Side


def _open_uniform(rng: np.random.Generator, upper: float) -> float:
    # U(0, upper) with 0 excluded so the weight sum can never vanish
    v = rng.uniform(0.0, upper)
    while v <= 0.0:
        v = rng.uniform(0.0, upper)
    return v


def sample_normal_agent(rng: np.random.Generator, w1_max: float, w2_max: float, w3_max: float, tau_max: int) -> NormalAgentParams:
    """Draws w_i ~ U(0, w_i_max) independently and tau uniformly from {1, ..., tau_max}."""
    w1 = _open_uniform(rng, w1_max)
    w2 = _open_uniform(rng, w2_max)
    w3 = _open_uniform(rng, w3_max)
    tau = int(rng.integers(1, tau_max, endpoint=True))
    return NormalAgentParams(w1=w1, w2=w2, w3=w3, tau=tau)


def expected_return(
    params: NormalAgentParams,
    fundamental: float,
    p_prev: float,
    p_lagged: float,
    epsilon: float,
    t: int,
) -> float:
    """
    Weighted mix of the fundamental log-gap, the historical log-return over
    tau steps and a noise term.

    While t < tau the technical term is zero; its weight still counts in the
    denominator.
    """
    numerator = params.w1 * math.log(fundamental / p_prev) + params.w3 * epsilon
    if t >= params.tau:
        numerator += params.w2 * math.log(p_prev / p_lagged)
    return numerator / params.weight_sum


def decide_order(
    params: NormalAgentParams,
    p_prev: float,
    expected: float,
    rho: float,
    price_spread: float,
    t: int,
    t_c: int,
    fundamental: float,
) -> Optional[OrderIntent]:
    """
    Scatters the order price uniformly around the expected price and picks
    the side: buy below the expected price, sell above it. During warm-up
    (t < t_c) the side is chosen against the fundamental value instead.
    Returns None on an exact tie.
    """
    p_expected = p_prev * math.exp(expected)
    p_order = p_expected + price_spread * (2.0 * rho - 1.0)
    reference = fundamental if t < t_c else p_expected
    if reference > p_order:
        return OrderIntent(side=Side.BUY, price=p_order)
    if reference < p_order:
        return OrderIntent(side=Side.SELL, price=p_order)
    return None
