"""Domain, mesh, and implicit-boundary unit tests."""

import numpy as np
import pytest

import fraclab as fl
from fraclab.errors import (
    ArgumentError,
    DegenerateError,
    DomainCollisionError,
    NoBoundaryError,
    OverlapError,
    SingularGradientError,
)


# ---------------------------------------------------------------------------
# Domain1D construction
# ---------------------------------------------------------------------------

def test_make_domain_single_interval():
    d = fl.make_domain([(-1.0, 1.0)])
    assert d.intervals == ((-1.0, 1.0),)


def test_make_domain_two_intervals_sorted():
    d = fl.make_domain([(1.0, 2.0), (-2.0, -1.0)])
    assert d.intervals == ((-2.0, -1.0), (1.0, 2.0))


def test_make_domain_overlap_and_touching_rejected():
    with pytest.raises(OverlapError):
        fl.make_domain([(0.0, 1.0), (0.5, 2.0)])
    with pytest.raises(OverlapError):
        fl.make_domain([(0.0, 1.0), (1.0, 2.0)])


def test_make_domain_degenerate_rejected():
    with pytest.raises(DegenerateError):
        fl.make_domain([(1.0, 1.0)])
    with pytest.raises(DegenerateError):
        fl.make_domain([(2.0, 1.0)])


# ---------------------------------------------------------------------------
# distance to complement
# ---------------------------------------------------------------------------

def test_dist_to_complement_values():
    d = fl.make_domain([(-1.0, 1.0)])
    assert fl.dist_to_complement(d, 0.0) == 1.0
    assert fl.dist_to_complement(d, 0.75) == pytest.approx(0.25)
    assert fl.dist_to_complement(d, 1.5) == 0.0
    assert fl.dist_to_complement(d, -1.0) == 0.0  # boundary is outside Omega


def test_dist_to_complement_lipschitz():
    d = fl.make_domain([(-2.0, -1.0), (0.5, 2.0)])
    rng = np.random.default_rng(3)
    xs = rng.uniform(-3.0, 3.0, size=400)
    ys = rng.uniform(-3.0, 3.0, size=400)
    dx = np.array([fl.dist_to_complement(d, float(x)) for x in xs])
    dy = np.array([fl.dist_to_complement(d, float(y)) for y in ys])
    assert np.all(np.abs(dx - dy) <= np.abs(xs - ys) + 1e-14)


# ---------------------------------------------------------------------------
# boundary points
# ---------------------------------------------------------------------------

def test_boundary_points_interval():
    pts = fl.boundary_points(fl.make_domain([(-1.0, 1.0)]))
    assert [(p.x, p.normal) for p in pts] == [(-1.0, -1.0), (1.0, 1.0)]
    assert [p.side for p in pts] == ["left", "right"]


def test_boundary_points_annulus():
    pts = fl.boundary_points(fl.make_domain([(-2.0, -1.0), (1.0, 2.0)]))
    assert [(p.x, p.normal) for p in pts] == [
        (-2.0, -1.0),
        (-1.0, 1.0),
        (1.0, -1.0),
        (2.0, 1.0),
    ]


def test_boundary_points_three_intervals():
    d = fl.make_domain([(0.0, 1.0), (2.0, 3.0), (4.0, 5.0)])
    assert len(fl.boundary_points(d)) == 6


# ---------------------------------------------------------------------------
# meshes
# ---------------------------------------------------------------------------

def test_make_mesh_uniform_nodes():
    mesh = fl.make_mesh(fl.make_domain([(-1.0, 1.0)]), 4, beta=1.0)
    np.testing.assert_allclose(mesh.nodes[0], [-1.0, -0.5, 0.0, 0.5, 1.0])


def test_make_mesh_graded_midpoint_fixed():
    mesh = fl.make_mesh(fl.make_domain([(0.0, 1.0)]), 2, beta=2.0)
    np.testing.assert_allclose(mesh.nodes[0], [0.0, 0.5, 1.0])


def test_make_mesh_grading_map_quarter_point():
    # sigma(1/4) = (1/16)/(1/16 + 9/16) = 0.1 for beta = 2
    mesh = fl.make_mesh(fl.make_domain([(0.0, 1.0)]), 4, beta=2.0)
    np.testing.assert_allclose(mesh.nodes[0], [0.0, 0.1, 0.5, 0.9, 1.0], atol=1e-15)


def test_make_mesh_argument_errors():
    d = fl.make_domain([(-1.0, 1.0)])
    with pytest.raises(ArgumentError):
        fl.make_mesh(d, 1, beta=2.0)
    with pytest.raises(ArgumentError):
        fl.make_mesh(d, 4, beta=0.5)


def test_mesh_refinement_doubles_nodes():
    d = fl.make_domain([(-2.0, -1.0), (1.0, 2.0)])
    m1 = fl.make_mesh(d, 8, beta=2.0)
    m2 = fl.make_mesh(d, 16, beta=2.0)
    for (a, b), n1, n2 in zip(d.intervals, m1.nodes, m2.nodes):
        assert n2.size == 2 * n1.size - 1  # shared endpoints counted once
        assert np.all(np.diff(n1) > 0)
        assert n1[0] == a and n1[-1] == b
    # interior dofs exclude all four endpoints
    assert m1.interior_x.size == 2 * (8 - 1)
    for a, b in d.intervals:
        assert a not in m1.interior_x and b not in m1.interior_x


# ---------------------------------------------------------------------------
# endpoint perturbation
# ---------------------------------------------------------------------------

def test_perturb_endpoint_moves_along_normal():
    d = fl.make_domain([(-1.0, 1.0)])
    left, right = fl.boundary_points(d)
    assert fl.perturb_endpoint(d, right, 0.1).intervals == ((-1.0, 1.1),)
    assert fl.perturb_endpoint(d, left, 0.1).intervals == ((-1.1, 1.0),)
    assert fl.perturb_endpoint(d, right, -0.1).intervals == ((-1.0, 0.9),)


def test_perturb_endpoint_collision():
    d = fl.make_domain([(-2.0, -1.0), (1.0, 2.0)])
    inner_right = [b for b in fl.boundary_points(d) if b.x == 1.0][0]
    with pytest.raises(DomainCollisionError):
        fl.perturb_endpoint(d, inner_right, 2.5)


# ---------------------------------------------------------------------------
# implicit 2D domains
# ---------------------------------------------------------------------------

def test_sample_boundary_circle():
    dom = fl.make_implicit_domain("x^2 + y^2 - 1", [-1.5, 1.5, -1.5, 1.5])
    samples = fl.sample_boundary_2d(dom, 16)
    assert len(samples) >= 16
    pts = np.array([p for p, _ in samples])
    nrm = np.array([n for _, n in samples])
    r2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
    assert np.max(np.abs(r2 - 1.0)) < 1e-8
    expected = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    assert np.max(np.abs(nrm - expected)) < 1e-4
    # the grid sweep passes through (1, 0) up to grid tolerance
    assert np.min(np.hypot(pts[:, 0] - 1.0, pts[:, 1])) < 0.2


def test_sample_boundary_example_domain_nonempty():
    dom = fl.make_implicit_domain(
        "x^2 + 10*(y^3 + x)^2 - 1", [-1.2, 1.2, -1.2, 1.2]
    )
    samples = fl.sample_boundary_2d(dom, 24)
    assert len(samples) >= 24
    vals = [
        abs(dom.g.evaluate({"x": p[0], "y": p[1]})) for p, _ in samples
    ]
    assert max(vals) < 1e-8


def test_sample_boundary_empty_domain():
    dom = fl.make_implicit_domain("x^2 + y^2 + 1", [-1.0, 1.0, -1.0, 1.0])
    with pytest.raises(NoBoundaryError):
        fl.sample_boundary_2d(dom, 8)


def test_sample_boundary_singular_gradient():
    dom = fl.make_implicit_domain("x*y", [-1.0, 1.0, -1.0, 1.0])
    with pytest.raises(SingularGradientError):
        fl.sample_boundary_2d(dom, 16, grad_tol=0.2)


# ---------------------------------------------------------------------------
# JSON round trips
# ---------------------------------------------------------------------------

def test_domain_json_round_trip_1d():
    d = fl.make_domain([(-2.0, -1.0), (1.0, 2.0)])
    assert fl.domain_from_json(fl.domain_to_json(d)) == d


def test_domain_json_round_trip_implicit():
    dom = fl.make_implicit_domain("x^2 + y^2 - 1", [-1.5, 1.5, -1.5, 1.5])
    obj = fl.domain_to_json(dom)
    back = fl.domain_from_json(obj)
    assert back.source == dom.source
    assert tuple(back.bbox) == tuple(dom.bbox)
