"""Uniform structured grids over implicitly defined bounded domains.

The solver discretizes a bounded domain in R^N (N >= 2) on a uniform tensor
lattice covering its bounding box.  Node classification:

* ``INTERIOR``  -- node center strictly inside the domain; these carry all
  unknowns,
* ``BOUNDARY``  -- node center on or outside the boundary but adjacent (in
  the 2N-point stencil) to an interior node; pinned to 0 in every solve,
* ``EXTERIOR``  -- everything else; excluded from all linear algebra.

Membership uses a strict inequality at node centers, so lattice nodes that
fall exactly on the boundary (the generic case for axis-aligned boxes)
become Dirichlet nodes.  On a box that reproduces the classical Dirichlet
stencil with (n-2)^N unknowns and its closed-form eigenvalues exactly; on a
curved domain the zero condition is imposed on the first lattice ring
outside the boundary, a first-order treatment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ResolutionTooCoarseError
from .expressions import compile_expression, point_variables

EXTERIOR = 0
INTERIOR = 1
BOUNDARY = 2


@dataclass(frozen=True)
class DomainSpec:
    """Implicit description of a bounded domain.

    ``kind`` is one of ``"box"``, ``"ball"``, ``"custom-implicit"``.  A
    custom domain supplies ``expression``, a signed-distance-like formula in
    the coordinates (negative inside), together with an explicit bounding
    box.  The bounding box must be a hypercube so that a single lattice
    spacing serves every axis.
    """

    kind: str
    dimension: int
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    center: tuple[float, ...] | None = None
    radius: float | None = None
    expression: str | None = None

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dimension}")
        if len(self.lo) != self.dimension or len(self.hi) != self.dimension:
            raise ValueError("bounding box arity does not match dimension")
        widths = np.asarray(self.hi, float) - np.asarray(self.lo, float)
        if np.any(widths <= 0):
            raise ValueError("bounding box must have positive extent on every axis")

    @classmethod
    def box(cls, lo, hi) -> "DomainSpec":
        lo = tuple(float(v) for v in lo)
        hi = tuple(float(v) for v in hi)
        return cls(kind="box", dimension=len(lo), lo=lo, hi=hi)

    @classmethod
    def unit_box(cls, ndim: int = 2) -> "DomainSpec":
        return cls.box((0.0,) * ndim, (1.0,) * ndim)

    @classmethod
    def ball(cls, center, radius: float) -> "DomainSpec":
        center = tuple(float(v) for v in center)
        r = float(radius)
        lo = tuple(c - r for c in center)
        hi = tuple(c + r for c in center)
        return cls(kind="ball", dimension=len(center), lo=lo, hi=hi,
                   center=center, radius=r)

    @classmethod
    def implicit(cls, expression: str, lo, hi) -> "DomainSpec":
        lo = tuple(float(v) for v in lo)
        hi = tuple(float(v) for v in hi)
        return cls(kind="custom-implicit", dimension=len(lo), lo=lo, hi=hi,
                   expression=expression)

    def membership_function(self):
        """Return phi(points) < 0 inside; points has shape (..., N)."""
        if self.kind == "box":
            lo = np.asarray(self.lo)
            hi = np.asarray(self.hi)

            def phi(points):
                below = np.max(lo - points, axis=-1)
                above = np.max(points - hi, axis=-1)
                return np.maximum(below, above)

            return phi
        if self.kind == "ball":
            center = np.asarray(self.center)
            radius = self.radius

            def phi(points):
                return np.linalg.norm(points - center, axis=-1) - radius

            return phi
        if self.kind == "custom-implicit":
            evaluator = compile_expression(self.expression,
                                           point_variables(self.dimension))

            def phi(points):
                coords = tuple(points[..., d] for d in range(points.shape[-1]))
                return np.asarray(evaluator(*coords), dtype=float)

            return phi
        raise ValueError(f"unknown domain kind {self.kind!r}")

    def diameter(self) -> float:
        """Diameter proxy used to cap sampling radii (bounding-box diagonal)."""
        if self.kind == "ball":
            return 2.0 * self.radius
        widths = np.asarray(self.hi, float) - np.asarray(self.lo, float)
        return float(np.linalg.norm(widths))


@dataclass(frozen=True)
class Grid:
    """Classified uniform lattice over the bounding box of a domain.

    ``classes`` has shape ``(n,) * N`` with values EXTERIOR/INTERIOR/BOUNDARY.
    Node coordinates along axis d are ``axes[d]``; the full lattice is their
    tensor product in C order (axis 0 slowest).  Immutable after
    construction; safe for concurrent reads.
    """

    domain: DomainSpec
    n: int
    h: float
    classes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.classes.setflags(write=False)

    @property
    def ndim(self) -> int:
        return self.domain.dimension

    @property
    def shape(self) -> tuple[int, ...]:
        return self.classes.shape

    @property
    def axes(self) -> list[np.ndarray]:
        return [self.domain.lo[d] + self.h * np.arange(self.n)
                for d in range(self.ndim)]

    @property
    def interior_mask(self) -> np.ndarray:
        return self.classes == INTERIOR

    @property
    def boundary_mask(self) -> np.ndarray:
        return self.classes == BOUNDARY

    @property
    def interior_count(self) -> int:
        return int(np.count_nonzero(self.classes == INTERIOR))

    @property
    def cell_volume(self) -> float:
        return self.h ** self.ndim

    def points(self) -> np.ndarray:
        """All node coordinates, shape (n, ..., n, N)."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def stencil_structure(self) -> np.ndarray:
        """Face-adjacency (2N-point) structuring element."""
        return ndimage.generate_binary_structure(self.ndim, 1)


def build_grid(domain: DomainSpec, n: int) -> Grid:
    """Build and classify the uniform grid with ``n`` nodes per axis.

    Raises :class:`ResolutionTooCoarseError` when the resolution leaves no
    interior node.
    """
    if n < 2:
        raise ResolutionTooCoarseError(f"need at least 2 nodes per axis, got {n}")
    widths = np.asarray(domain.hi, float) - np.asarray(domain.lo, float)
    if np.max(widths) - np.min(widths) > 1e-9 * np.max(widths):
        raise ValueError("bounding box must be a hypercube (equal axis extents)")
    h = float(widths[0]) / (n - 1)

    axes = [domain.lo[d] + h * np.arange(n) for d in range(domain.dimension)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack(mesh, axis=-1)
    member = domain.membership_function()(points) < 0.0

    if not member.any():
        raise ResolutionTooCoarseError(
            f"no interior node at resolution n={n}; refine the grid")

    ring = ndimage.binary_dilation(member, structure=ndimage.generate_binary_structure(domain.dimension, 1))
    classes = np.full(member.shape, EXTERIOR, dtype=np.uint8)
    classes[ring & ~member] = BOUNDARY
    classes[member] = INTERIOR
    return Grid(domain=domain, n=n, h=h, classes=classes)
