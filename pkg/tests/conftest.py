import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from multibump.energy import NonlinearitySpec, truncate_nonlinearity
from multibump.grid import DomainSpec, build_grid
from multibump.topology import decompose_components
from multibump.weights import (WeightSpec, cbrt_ring_weight, detect_zero_set,
                               evaluate_weight)


def ring_config(resolution: int = 129, gamma: float = 10.0, out: str = "out",
                scale: float = 1.0) -> dict:
    """Ball of radius 2 with the cube-root ring weight (chi = 2)."""
    return {
        "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": 2.0},
        "weight": {
            "kind": "radial-piecewise",
            "center": [0.0, 0.0],
            "pieces": [
                {"r_max": 1.0, "expr": "cbrt(1 - r**2)"},
                {"r_max": 2.0, "expr": "sqrt((1 - r)*(r - 2))"},
            ],
            "zero_radii": [1.0],
            "scale": scale,
        },
        "nonlinearity": {"kind": "logistic-default", "gamma": gamma, "s_star": 1.0},
        "resolution": resolution,
        "output_dir": out,
    }


def nested_rings_config(resolution: int = 65, out: str = "out") -> dict:
    """Three nested ring zeros in the ball of radius 2 (chi = 4)."""
    return {
        "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": 2.0},
        "weight": {
            "kind": "product-of-powers",
            "factors": [
                {"center": [0.0, 0.0], "radius": 0.5, "power": 0.6},
                {"center": [0.0, 0.0], "radius": 1.0, "power": 0.6},
                {"center": [0.0, 0.0], "radius": 1.5, "power": 0.6},
            ],
            "scale": 0.5,
        },
        "nonlinearity": {"kind": "logistic-default", "gamma": 30.0, "s_star": 1.0},
        "resolution": resolution,
        "output_dir": out,
    }


def quadratic_zero_config(resolution: int = 129, out: str = "out") -> dict:
    """Weight |x - x0|^2: inadmissible (fails the integrability side of (a2))."""
    return {
        "domain": {"kind": "box", "lo": [0.0, 0.0], "hi": [1.0, 1.0]},
        "weight": {
            "kind": "product-of-powers",
            "factors": [{"center": [0.5, 0.5], "radius": 0.0, "power": 2.0}],
        },
        "nonlinearity": {"kind": "logistic-default", "gamma": 10.0, "s_star": 1.0},
        "resolution": resolution,
        "output_dir": out,
    }


@pytest.fixture(scope="session")
def square33():
    """Unit square at n=33 with constant weight: grid, field, zero, component."""
    grid = build_grid(DomainSpec.unit_box(2), 33)
    field = evaluate_weight(WeightSpec.constant(1.0), grid)
    zero = detect_zero_set(field, grid)
    decomposition = decompose_components(grid, zero)
    return grid, field, zero, decomposition.components[0]


@pytest.fixture(scope="session")
def ring65():
    """Ring weight on the ball of radius 2 at n=65: grid, field, zero, dec."""
    grid = build_grid(DomainSpec.ball((0.0, 0.0), 2.0), 65)
    field = evaluate_weight(cbrt_ring_weight(), grid)
    zero = detect_zero_set(field, grid)
    decomposition = decompose_components(grid, zero)
    return grid, field, zero, decomposition


@pytest.fixture(scope="session")
def logistic30():
    return truncate_nonlinearity(NonlinearitySpec.logistic(30.0, 1.0))


@pytest.fixture(scope="session")
def logistic10():
    return truncate_nonlinearity(NonlinearitySpec.logistic(10.0, 1.0))
