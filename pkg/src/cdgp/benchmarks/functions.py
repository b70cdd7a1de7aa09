"""Closed-form test functions behind the benchmark scenarios.

Every function takes inputs of shape (n, d), or (n,) when d = 1, and returns a vector of n values.

The Borehole and Branin fidelities follow the emukit multi-fidelity test functions:

    D(c)             = log(r / rw) (c + 2 L Tu / (log(r / rw) rw^2 Kw) + Tu / Tl)
    borehole_high(x) = 2 pi Tu (Hu - Hl) / D(1)
    borehole_low(x)  = 5 Tu (Hu - Hl) / D(1.5)

with x = (rw, r, Tu, Hu, Tl, Hl, L, Kw), and

    branin_high(x)   = (x2 - 5.1 x1^2 / (4 pi^2) + 5 x1 / pi - 6)^2
                       + 10 (1 - 1 / (8 pi)) cos(x1) + 10
    branin_medium(x) = 10 sqrt(branin_high(x - 2)) + 2 (x1 - 0.5) - 3 (3 x2 - 1) - 1
    branin_low(x)    = branin_medium(1.2 (x + 2)) - 3 x2 + 1
"""

from collections.abc import Callable

import numpy as np

from cdgp.models import as_inputs

TestFunction = Callable[[np.ndarray], np.ndarray]

BOREHOLE_BOX = (
    (0.05, 0.15),  # rw, radius of the borehole
    (100.0, 50000.0),  # r, radius of influence
    (63070.0, 115600.0),  # Tu, transmissivity of the upper aquifer
    (990.0, 1110.0),  # Hu, potentiometric head of the upper aquifer
    (63.1, 116.0),  # Tl, transmissivity of the lower aquifer
    (700.0, 820.0),  # Hl, potentiometric head of the lower aquifer
    (1120.0, 1680.0),  # L, length of the borehole
    (9855.0, 12045.0),  # Kw, hydraulic conductivity
)
BRANIN_BOX = ((-5.0, 10.0), (0.0, 15.0))
BRANIN_MINIMUM = 0.397887357729738
BRANIN_MINIMIZERS = ((-np.pi, 12.275), (np.pi, 2.275), (3 * np.pi, 2.475))
UNIT_BOX = ((0.0, 1.0),)


def _scalar(x: np.ndarray) -> np.ndarray:
    return as_inputs(x)[:, 0]


def sin_8pi(x: np.ndarray) -> np.ndarray:
    """Low fidelity of the first nonlinear scenario, sin(8 pi x).

    >>> float(sin_8pi(0.0625)[0])
    1.0
    """
    return np.sin(8 * np.pi * _scalar(x))


def squared_warp(x: np.ndarray) -> np.ndarray:
    """High fidelity of the first nonlinear scenario, (x - sqrt(2)) sin^2(8 pi x)."""
    t = _scalar(x)
    return (t - np.sqrt(2.0)) * np.sin(8 * np.pi * t) ** 2


def cos_15(x: np.ndarray) -> np.ndarray:
    """Low fidelity of the second nonlinear scenario, cos(15 x)."""
    return np.cos(15 * _scalar(x))


def exp_warp(x: np.ndarray) -> np.ndarray:
    """High fidelity of the second nonlinear scenario, x exp(cos(15 (2x - 0.2))) - 1.

    >>> float(exp_warp(0.0)[0])
    -1.0
    """
    t = _scalar(x)
    return t * np.exp(np.cos(15 * (2 * t - 0.2))) - 1.0


def identity(x: np.ndarray) -> np.ndarray:
    """Linear low fidelity of the compositional variants."""
    return np.array(_scalar(x), dtype=np.float64)


def tanh(x: np.ndarray) -> np.ndarray:
    """Hyperbolic tangent low fidelity of the compositional variants."""
    return np.tanh(_scalar(x))


def sin_4pi(x: np.ndarray) -> np.ndarray:
    """Half-frequency sine low fidelity of the compositional variants."""
    return np.sin(4 * np.pi * _scalar(x))


def _borehole(x: np.ndarray, numerator: float, offset: float) -> np.ndarray:
    X = as_inputs(x)
    rw, r, tu, hu, tl, hl, length, kw = X.T
    log_ratio = np.log(r / rw)
    denominator = log_ratio * (offset + 2 * length * tu / (log_ratio * rw**2 * kw) + tu / tl)
    return numerator * tu * (hu - hl) / denominator


def borehole_high(x: np.ndarray) -> np.ndarray:
    """Water flow rate through a borehole, shape (n, 8) inputs."""
    return _borehole(x, 2 * np.pi, 1.0)


def borehole_low(x: np.ndarray) -> np.ndarray:
    """Cheap approximation of `borehole_high`."""
    return _borehole(x, 5.0, 1.5)


def branin_high(x: np.ndarray) -> np.ndarray:
    """Branin function on shape (n, 2) inputs; three global minima of value 0.397887."""
    X = as_inputs(x)
    x1, x2 = X[:, 0], X[:, 1]
    return (
        (x2 - 5.1 / (4 * np.pi**2) * x1**2 + 5 * x1 / np.pi - 6) ** 2
        + 10 * (1 - 1 / (8 * np.pi)) * np.cos(x1)
        + 10
    )


def branin_medium(x: np.ndarray) -> np.ndarray:
    """Middle fidelity of the Branin hierarchy."""
    X = as_inputs(x)
    x1, x2 = X[:, 0], X[:, 1]
    return 10 * np.sqrt(branin_high(X - 2)) + 2 * (x1 - 0.5) - 3 * (3 * x2 - 1) - 1


def branin_low(x: np.ndarray) -> np.ndarray:
    """Lowest fidelity of the Branin hierarchy."""
    X = as_inputs(x)
    return branin_medium(1.2 * (X + 2)) - 3 * X[:, 1] + 1
