"""Zero-extension of bumps and enumeration of multi-bump solutions.

A converged bump on one component extends by zero to the whole lattice and
remains a discrete solution, because the stencil decouples across the
pinned zero set.  Any nonempty subset of components therefore sums to a
solution with one bump per member, giving 2^chi - 1 distinct solutions
whose n-bump counts follow the binomial coefficients.

Solutions are stored sparsely (per-component nodal slices keyed by the
subset); dense lattice fields are materialized only on export.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .energy import BumpSolution
from .errors import EnumerationSizeError, MissingBumpError
from .grid import Grid
from .weights import WeightField

ComponentId = tuple[int, int]


def extend_bump(bump: BumpSolution, grid: Grid) -> np.ndarray:
    """Extend a component bump by zero to the full lattice."""
    field = np.zeros(grid.shape)
    field.ravel()[bump.nodes] = bump.values
    return field


def w11_seminorm(values: np.ndarray, grid: Grid) -> float:
    """Discrete unweighted gradient mass sum_edges |u_i - u_j| h^(N-1)."""
    total = 0.0
    for axis in range(grid.ndim):
        total += float(np.sum(np.abs(np.diff(values, axis=axis))))
    return total * grid.h ** (grid.ndim - 1)


def holder_bound_report(values: np.ndarray, field: WeightField, grid: Grid) -> dict:
    """Cauchy-Schwarz control of the gradient mass by the weighted energy.

    Over the edges where the extended bump varies,

        sum |du| h^(N-1)  <=  sqrt(sum h^N / c_e) * sqrt(sum c_e du^2 h^(N-2)),

    the discrete form of bounding the W^(1,1) seminorm through the
    reciprocal weight mass and the weighted Dirichlet energy.
    """
    hN = grid.cell_volume
    w11 = 0.0
    reciprocal_mass = 0.0
    energy_quad = 0.0
    for axis in range(grid.ndim):
        du = np.diff(values, axis=axis)
        active = du != 0.0
        if not active.any():
            continue
        c = field.conductances[axis][active]
        d = np.abs(du[active])
        w11 += float(np.sum(d)) * grid.h ** (grid.ndim - 1)
        reciprocal_mass += float(np.sum(hN / c))
        energy_quad += float(np.sum(c * d ** 2)) * grid.h ** (grid.ndim - 2)
    bound = float(np.sqrt(reciprocal_mass * energy_quad))
    return {
        "w11_seminorm": w11,
        "reciprocal_mass": reciprocal_mass,
        "weighted_energy": energy_quad,
        "bound": bound,
        "satisfied": w11 <= bound * (1.0 + 1e-12),
    }


@dataclass(frozen=True)
class MultiBumpSolution:
    """Sum of zero-extended bumps over a nonempty component subset."""

    subset: tuple[ComponentId, ...]
    bumps: dict[ComponentId, BumpSolution]
    energy: float

    @property
    def n_bumps(self) -> int:
        return len(self.subset)

    def field(self, grid: Grid) -> np.ndarray:
        """Materialize the dense nodal field (zero off the subset)."""
        values = np.zeros(grid.shape)
        flat = values.ravel()
        for comp_id in self.subset:
            bump = self.bumps[comp_id]
            flat[bump.nodes] = bump.values
        return values

    @property
    def min_value(self) -> float:
        return min(0.0, min(self.bumps[c].min_value for c in self.subset))

    @property
    def max_value(self) -> float:
        return max(0.0, max(self.bumps[c].max_value for c in self.subset))

    def label(self) -> str:
        return "+".join(f"({i},{l})" for i, l in self.subset)


def compose_bumps(bumps: dict[ComponentId, BumpSolution], subset) -> MultiBumpSolution:
    """Compose the bumps of a nonempty component subset into one solution."""
    subset = tuple(sorted(subset))
    if not subset:
        raise MissingBumpError("the empty subset is the trivial solution; excluded")
    for comp_id in subset:
        if comp_id not in bumps:
            raise MissingBumpError(f"no converged bump for component {comp_id}")
    energy = float(sum(bumps[c].energy for c in subset))
    return MultiBumpSolution(subset=subset,
                             bumps={c: bumps[c] for c in subset},
                             energy=energy)


def enumerate_all(bumps: dict[ComponentId, BumpSolution], max_chi: int = 20,
                  allow_large: bool = False) -> list[MultiBumpSolution]:
    """All 2^chi - 1 solutions, ordered by (n_bumps, lexicographic subset).

    Refuses chi > max_chi unless ``allow_large`` is set; the n-bump counts
    equal the binomial coefficients by construction.
    """
    chi = len(bumps)
    if chi > max_chi and not allow_large:
        raise EnumerationSizeError(
            f"chi = {chi} would enumerate 2^{chi} - 1 solutions; "
            f"pass allow_large to exceed max_chi = {max_chi}")
    ids = sorted(bumps)
    solutions = []
    for n in range(1, chi + 1):
        for subset in combinations(ids, n):
            solutions.append(compose_bumps(bumps, subset))
    assert len(solutions) == 2 ** chi - 1
    return solutions


def bump_histogram(solutions: list[MultiBumpSolution]) -> dict[int, int]:
    hist: dict[int, int] = {}
    for sol in solutions:
        hist[sol.n_bumps] = hist.get(sol.n_bumps, 0) + 1
    return dict(sorted(hist.items()))


def expected_histogram(chi: int) -> dict[int, int]:
    return {n: comb(chi, n) for n in range(1, chi + 1)}
