"""Truncated nonlinearity, discrete energy, and one-bump minimization.

On each component D the functional

    J(u) = 1/2 sum_edges c_e (u_i - u_j)^2 h^(N-2) - sum_nodes F*(u_i) h^N

is minimized by gradient descent with Armijo backtracking, where F* is the
primitive of the truncated nonlinearity f*: equal to f on (-beta*, s*),
frozen at f(-beta*) below -beta*, and zero above s*.  The truncation makes
J coercive and forces the minimizer into [0, s*] without any clamping; the
bounds emerge from stationarity alone.

Minimization starts from a small positive multiple of the first Dirichlet
eigenfunction chosen so the energy is already negative, which is possible
exactly when the spectral margin condition (f2) holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .assembly import build_stiffness
from .errors import (HypothesisViolationError, InvalidNonlinearityError,
                     NumericalFailureError, SeedFailureError)
from .expressions import compile_expression
from .grid import Grid
from .spectral import EigenPair
from .topology import Component
from .weights import WeightField


@dataclass(frozen=True)
class NonlinearitySpec:
    """Reaction term f with slope gamma at 0+, upper zero s*, margin beta*.

    Required shape: f(0) = 0 with a strict local minimum at 0, f > 0 on
    (0, s*) with f(s*) = 0, f > 0 on [-beta*, 0), and finite one-sided
    slope gamma = lim f(s)/s as s -> 0+.
    """

    kind: str
    gamma: float
    s_star: float
    beta_star: float
    evaluator: Callable | None = None
    expr: str | None = None

    @classmethod
    def logistic(cls, gamma: float, s_star: float = 1.0,
                 beta_star: float | None = None) -> "NonlinearitySpec":
        """Default nonlinearity gamma*|s|*(1 - s/s*) capped at zero past s*."""
        if beta_star is None:
            beta_star = s_star / 2.0
        return cls(kind="logistic-default", gamma=float(gamma),
                   s_star=float(s_star), beta_star=float(beta_star))

    @classmethod
    def custom(cls, evaluator: Callable | str, gamma: float, s_star: float,
               beta_star: float) -> "NonlinearitySpec":
        expr = None
        if isinstance(evaluator, str):
            expr = evaluator
            evaluator = compile_expression(evaluator, ("s",))
        return cls(kind="custom", gamma=float(gamma), s_star=float(s_star),
                   beta_star=float(beta_star), evaluator=evaluator, expr=expr)

    def f(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "logistic-default":
            return np.where(s <= self.s_star,
                            self.gamma * np.abs(s) * (1.0 - s / self.s_star),
                            0.0)
        return np.asarray(self.evaluator(s), dtype=float)


def validate_nonlinearity(spec: NonlinearitySpec, samples: int = 2048,
                          slope_rtol: float = 0.05) -> None:
    """Sampled check of the shape conditions (f1); raises on violation."""
    if spec.gamma <= 0 or spec.s_star <= 0 or spec.beta_star <= 0:
        raise InvalidNonlinearityError(
            "gamma, s_star and beta_star must all be positive")
    scale = spec.gamma * spec.s_star
    if abs(float(spec.f(0.0))) > 1e-12 * scale:
        raise InvalidNonlinearityError("f(0) must vanish")
    if abs(float(spec.f(spec.s_star))) > 1e-9 * scale:
        raise InvalidNonlinearityError(f"f(s*) must vanish at s* = {spec.s_star}")
    inner = np.linspace(0.0, spec.s_star, samples + 2)[1:-1]
    if np.min(spec.f(inner)) <= 0.0:
        raise InvalidNonlinearityError("f must be strictly positive on (0, s*)")
    lower = np.linspace(-spec.beta_star, 0.0, samples + 1)[:-1]
    if np.min(spec.f(lower)) <= 0.0:
        raise InvalidNonlinearityError("f must be strictly positive on [-beta*, 0)")
    delta = 1e-8 * spec.s_star
    slope = float(spec.f(delta)) / delta
    if abs(slope - spec.gamma) > slope_rtol * spec.gamma:
        raise InvalidNonlinearityError(
            f"slope of f at 0+ is {slope:.6g}, declared gamma is {spec.gamma:.6g}")


@dataclass(frozen=True)
class TruncatedNonlinearity:
    """f* and its primitive F* (F*(0) = 0, nondecreasing on [0, s*])."""

    base: NonlinearitySpec
    _table_s: np.ndarray | None = dc_field(default=None, repr=False)
    _table_F: np.ndarray | None = dc_field(default=None, repr=False)

    @property
    def f_at_minus_beta(self) -> float:
        return float(self.base.f(-self.base.beta_star))

    def f_star(self, s):
        s = np.asarray(s, dtype=float)
        b = self.base
        return np.where(s >= b.s_star, 0.0,
                        np.where(s <= -b.beta_star, self.f_at_minus_beta, b.f(s)))

    def slope_bound(self) -> float:
        """Bound on |f*'| used in descent step sizing."""
        b = self.base
        if b.kind == "logistic-default":
            return b.gamma * (1.0 + 2.0 * b.beta_star / b.s_star)
        s = np.linspace(-b.beta_star, b.s_star, 4097)
        return float(np.max(np.abs(np.diff(self.f_star(s)) / np.diff(s))))

    def F_star(self, s):
        s = np.asarray(s, dtype=float)
        b = self.base
        if b.kind == "logistic-default":
            g, ss, bb = b.gamma, b.s_star, b.beta_star
            top = g * ss ** 2 / 6.0
            f_mb = g * bb * (1.0 + bb / ss)
            F_mb = g * (-bb ** 2 / 2.0 - bb ** 3 / (3.0 * ss))
            pos = g * (s ** 2 / 2.0 - s ** 3 / (3.0 * ss))
            neg = g * (-(s ** 2) / 2.0 + s ** 3 / (3.0 * ss))
            mid = np.where(s >= 0.0, pos, neg)
            return np.where(s >= ss, top,
                            np.where(s <= -bb, F_mb + f_mb * (s + bb), mid))
        inner = np.interp(np.clip(s, -b.beta_star, b.s_star),
                          self._table_s, self._table_F)
        F_top = self._table_F[-1]
        F_bot = self._table_F[0]
        return np.where(s >= b.s_star, F_top,
                        np.where(s <= -b.beta_star,
                                 F_bot + self.f_at_minus_beta * (s + b.beta_star),
                                 inner))


def _simpson_table(spec: NonlinearitySpec) -> tuple[np.ndarray, np.ndarray]:
    # Cumulative primitive of f on [-beta*, s*], anchored at F(0) = 0, with
    # 0 as a knot; composite Simpson per panel of width <= s*/1000.
    def knots(a, b):
        panels = max(int(np.ceil((b - a) / (spec.s_star / 1000.0))), 1)
        return np.linspace(a, b, panels + 1)

    s = np.unique(np.concatenate([knots(-spec.beta_star, 0.0), knots(0.0, spec.s_star)]))
    mids = 0.5 * (s[:-1] + s[1:])
    widths = np.diff(s)
    panel = (widths / 6.0) * (spec.f(s[:-1]) + 4.0 * spec.f(mids) + spec.f(s[1:]))
    cumulative = np.concatenate([[0.0], np.cumsum(panel)])
    anchor = np.interp(0.0, s, cumulative)
    return s, cumulative - anchor


def truncate_nonlinearity(spec: NonlinearitySpec) -> TruncatedNonlinearity:
    """Validate the shape conditions and build f* with its primitive."""
    validate_nonlinearity(spec)
    if spec.kind == "logistic-default":
        return TruncatedNonlinearity(base=spec)
    table_s, table_F = _simpson_table(spec)
    return TruncatedNonlinearity(base=spec, _table_s=table_s, _table_F=table_F)


def primitive_F(trunc: TruncatedNonlinearity, s) -> float | np.ndarray:
    """F*(s), the primitive of the truncated nonlinearity from 0."""
    out = trunc.F_star(s)
    return float(out) if np.isscalar(s) or np.ndim(s) == 0 else out


@dataclass(frozen=True)
class DiscreteEnergy:
    """J and its exact gradient on one component's nodes."""

    component: Component
    K: object = dc_field(repr=False)
    trunc: TruncatedNonlinearity = dc_field(repr=False)
    cell_volume: float
    a_max_closure: float
    lipschitz: float

    @property
    def size(self) -> int:
        return self.K.shape[0]

    def value(self, u: np.ndarray) -> float:
        return 0.5 * float(u @ (self.K @ u)) \
            - float(np.sum(self.trunc.F_star(u))) * self.cell_volume

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return self.K @ u - self.trunc.f_star(u) * self.cell_volume


def assemble_energy(component: Component, field: WeightField,
                    trunc: TruncatedNonlinearity, grid: Grid) -> DiscreteEnergy:
    """Assemble J on a component (weighted stiffness + lumped reaction).

    Mass lumping makes the gradient exactly K u - f*(u) h^N, the true
    derivative of the discrete value.
    """
    unknown = np.zeros(grid.shape, dtype=bool)
    unknown.ravel()[component.nodes] = True
    K, _ = build_stiffness(grid, field.conductances, unknown)
    values = field.values.ravel()
    closure = np.concatenate([component.nodes, component.shell])
    a_max = float(np.max(values[closure]))
    hN = grid.cell_volume
    row_sums = np.asarray(np.abs(K).sum(axis=1)).ravel()
    lipschitz = float(np.max(row_sums)) + trunc.slope_bound() * hN
    return DiscreteEnergy(component=component, K=K, trunc=trunc,
                          cell_volume=hN, a_max_closure=a_max,
                          lipschitz=lipschitz)


@dataclass(frozen=True)
class SolverOptions:
    """Descent and seeding controls for bump minimization."""

    grad_tol_scale: float = 1e-8
    max_iterations: int = 100000
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    step_growth: float = 1.3
    seed_min_exponent: int = 30

    def grad_tolerance(self, gamma: float, cell_volume: float) -> float:
        return self.grad_tol_scale * gamma * cell_volume


@dataclass(frozen=True)
class BumpSolution:
    """Converged nonnegative minimizer on one component.

    ``values`` live on ``nodes`` (flat lattice indices of the component).
    """

    component_id: tuple[int, int]
    nodes: np.ndarray
    values: np.ndarray
    energy: float
    grad_norm: float
    min_value: float
    max_value: float
    iterations: int
    seed_scale: float

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.values.setflags(write=False)


def minimize_energy(energy: DiscreteEnergy, eigen: EigenPair,
                    options: SolverOptions | None = None) -> BumpSolution:
    """Gradient descent with Armijo backtracking from a negative-energy seed.

    Refuses to run when the spectral margin (f2) fails on this component,
    since the negative seed J(s e1) < 0 is then not available.  No bounds
    are enforced during descent; the truncation alone drives the minimizer
    into [0, s*].
    """
    opts = options or SolverOptions()
    b = energy.trunc.base
    margin = b.gamma / eigen.lambda1 - energy.a_max_closure
    if margin <= 0.0:
        raise HypothesisViolationError(
            "f2", f"component {energy.component.id}: "
            f"max(a) = {energy.a_max_closure:.6g} >= gamma/lambda1 = "
            f"{b.gamma / eigen.lambda1:.6g}")

    e1 = eigen.e1
    s0 = b.s_star
    smallest = b.s_star * 2.0 ** (-opts.seed_min_exponent)
    while energy.value(s0 * e1) >= 0.0:
        s0 *= 0.5
        if s0 < smallest:
            raise SeedFailureError(
                f"no negative-energy seed on component {energy.component.id}; "
                "the (f2) margin is too small at this resolution")

    tol = opts.grad_tolerance(b.gamma, energy.cell_volume)
    K = energy.K
    hN = energy.cell_volume
    u = s0 * e1
    Ku = K @ u
    J = 0.5 * float(u @ Ku) - float(np.sum(energy.trunc.F_star(u))) * hN
    # Steps of 1/L satisfy the descent lemma unconditionally, so the line
    # search never shrinks below alpha_floor: near convergence the Armijo
    # decrease falls under double-precision resolution of J and the test
    # would otherwise reject genuinely decreasing steps.
    alpha_floor = 1.0 / energy.lipschitz
    alpha = alpha_floor
    alpha_cap = 1024.0 * alpha_floor

    for iteration in range(1, opts.max_iterations + 1):
        if iteration % 512 == 0:
            # Resynchronize the incrementally updated matvec and energy.
            Ku = K @ u
            J = 0.5 * float(u @ Ku) - float(np.sum(energy.trunc.F_star(u))) * hN
        g = Ku - energy.trunc.f_star(u) * hN
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= tol:
            return BumpSolution(
                component_id=energy.component.id, nodes=energy.component.nodes,
                values=u, energy=J, grad_norm=gnorm,
                min_value=float(np.min(u)), max_value=float(np.max(u)),
                iterations=iteration - 1, seed_scale=s0)
        Kg = K @ g
        g_Ku = float(g @ Ku)
        g_Kg = float(g @ Kg)
        g_g = float(g @ g)
        quad = 0.5 * float(u @ Ku)
        while True:
            trial_F = float(np.sum(energy.trunc.F_star(u - alpha * g))) * hN
            J_trial = quad - alpha * g_Ku + 0.5 * alpha * alpha * g_Kg - trial_F
            if J_trial <= J - opts.armijo_c * alpha * g_g:
                break
            if alpha <= alpha_floor:
                break
            alpha = max(alpha * opts.backtrack, alpha_floor)
        u = u - alpha * g
        Ku = Ku - alpha * Kg
        J = J_trial
        alpha = min(alpha * opts.step_growth, alpha_cap)

    raise NumericalFailureError(
        f"descent did not reach gradient tolerance {tol:.3g} within "
        f"{opts.max_iterations} iterations on component {energy.component.id}")
