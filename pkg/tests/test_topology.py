import numpy as np
import pytest

from multibump.errors import EmptyDecompositionError, HypothesisViolationError
from multibump.grid import DomainSpec, build_grid
from multibump.topology import decompose_components
from multibump.weights import (WeightSpec, ZeroSet, detect_zero_set,
                               evaluate_weight)


def test_ring_weight_disk_plus_annulus(ring65):
    grid, field, zero, dec = ring65
    assert dec.chi == 2
    assert dec.j_counts == {1: 1, 2: 1}
    disk = dec.component((1, 1))
    annulus = dec.component((2, 1))
    # The disk component is the region inside the zero circle.
    disk_r = np.linalg.norm(grid.points().reshape(-1, 2)[disk.nodes], axis=-1)
    assert np.max(disk_r) < 1.0
    ann_r = np.linalg.norm(grid.points().reshape(-1, 2)[annulus.nodes], axis=-1)
    assert np.min(ann_r) > 1.0


def test_domain_with_hole_and_three_curves():
    # One hole plus two small circles enclosed by a third: chi = 4 with
    # two 1-manifold components and two 3-manifold components.
    domain = DomainSpec.implicit(
        "maximum(sqrt(x**2 + y**2) - 2, 0.3 - sqrt((x + 1.2)**2 + y**2))",
        (-2.0, -2.0), (2.0, 2.0))
    weight = WeightSpec.power_product([
        ((0.7, 0.45), 0.25, 0.6),
        ((0.7, -0.45), 0.25, 0.6),
        ((0.7, 0.0), 1.0, 0.6),
    ])
    grid = build_grid(domain, 65)
    field = evaluate_weight(weight, grid)
    zero = detect_zero_set(field, grid)
    dec = decompose_components(grid, zero)
    assert dec.chi == 4
    assert dec.j_counts == {1: 2, 3: 2}


def test_constant_weight_single_component(square33):
    grid, field, zero, component = square33
    assert component.id == (1, 1)
    assert component.boundary_manifold_count == 1
    assert component.node_count == 31 * 31


def test_components_partition_free_nodes(ring65):
    grid, field, zero, dec = ring65
    free = grid.interior_mask & ~zero.mask
    seen = np.zeros(grid.classes.size, dtype=int)
    for comp in dec.components:
        seen[comp.nodes] += 1
    assert np.all(seen[free.ravel()] == 1)
    assert np.all(seen[~free.ravel()] == 0)


def test_shell_contains_no_component_nodes(ring65):
    grid, field, zero, dec = ring65
    pinned = zero.mask.ravel() | grid.boundary_mask.ravel()
    for comp in dec.components:
        assert comp.shell.size > 0
        assert np.all(pinned[comp.shell])


def test_decomposition_deterministic(ring65):
    grid, field, zero, _ = ring65
    a = decompose_components(grid, zero)
    b = decompose_components(grid, zero)
    assert [c.id for c in a.components] == [c.id for c in b.components]
    for ca, cb in zip(a.components, b.components):
        assert np.array_equal(ca.nodes, cb.nodes)


def test_zero_set_touching_boundary_raises(ring65):
    grid, *_ = ring65
    spec = WeightSpec.expression(
        "sqrt((x - 0.5)**2 + where(y < 0.5, (0.5 - y)**2, 0))")
    box = build_grid(DomainSpec.unit_box(2), 33)
    field = evaluate_weight(spec, box)
    zero = detect_zero_set(field, box)
    with pytest.raises(HypothesisViolationError) as err:
        decompose_components(box, zero)
    assert err.value.hypothesis == "a1"


def test_all_nodes_masked_raises(square33):
    grid, field, _, _ = square33
    full = ZeroSet(mask=grid.interior_mask.copy(), eps_zero=0.5, band=0.75,
                   touches_domain_boundary=False)
    with pytest.raises(EmptyDecompositionError):
        decompose_components(grid, full)


def test_four_nested_rings_give_chi_five():
    grid = build_grid(DomainSpec.ball((0.0, 0.0), 2.0), 65)
    spec = WeightSpec.power_product(
        [((0.0, 0.0), r, 0.6) for r in (0.4, 0.8, 1.2, 1.6)], scale=0.5)
    field = evaluate_weight(spec, grid)
    zero = detect_zero_set(field, grid)
    dec = decompose_components(grid, zero)
    assert dec.chi == 5
    assert sum(dec.j_counts.values()) == 5
