"""1D multi-interval domains, graded meshes, and implicit 2D domains.

A :class:`Domain1D` is a finite union of disjoint open intervals.  Meshes
are per-interval node sets produced by the symmetric grading map
``sigma(t) = t^beta / (t^beta + (1-t)^beta)``, which clusters nodes at the
interval endpoints where fractional eigenfunctions behave like dist^s.
2D domains enter only through sampled level-set boundaries used by the
field certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ArgumentError,
    DegenerateError,
    DomainCollisionError,
    NoBoundaryError,
    OverlapError,
    SingularGradientError,
)
from .expressions import Expr, parse_expression

__all__ = [
    "Domain1D",
    "BoundaryPoint1D",
    "Mesh1D",
    "ImplicitDomain2D",
    "make_domain",
    "dist_to_complement",
    "boundary_points",
    "make_mesh",
    "make_implicit_domain",
    "sample_boundary_2d",
    "perturb_endpoint",
    "domain_to_json",
    "domain_from_json",
]


@dataclass(frozen=True)
class Domain1D:
    """Finite union of disjoint open intervals, sorted by left endpoint."""

    intervals: tuple[tuple[float, float], ...]

    @property
    def hull(self) -> tuple[float, float]:
        return (self.intervals[0][0], self.intervals[-1][1])

    @property
    def diameter(self) -> float:
        lo, hi = self.hull
        return hi - lo

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self.intervals)


@dataclass(frozen=True)
class BoundaryPoint1D:
    """Domain boundary point with outward unit normal (-1 left end, +1 right end)."""

    x: float
    normal: int
    side: str  # "left" | "right" end of its interval
    interval_index: int


def make_domain(intervals: Sequence[Sequence[float]]) -> Domain1D:
    """Validate and sort intervals into a :class:`Domain1D`.

    Raises DegenerateError for an empty/inverted interval and OverlapError
    when two intervals touch or overlap.
    """
    if not intervals:
        raise DegenerateError("domain needs at least one interval")
    ivs = sorted((float(a), float(b)) for a, b in intervals)
    for a, b in ivs:
        if not (b > a):
            raise DegenerateError(f"interval ({a}, {b}) has non-positive length")
    for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
        if a1 <= b0:
            raise OverlapError(f"intervals ({a0}, {b0}) and ({a1}, {b1}) touch or overlap")
    return Domain1D(tuple(ivs))


def dist_to_complement(domain: Domain1D, x):
    """delta(x) = dist(x, complement of the domain); 0 outside the domain."""
    arr = np.asarray(x, dtype=float)
    out = np.zeros_like(arr)
    for a, b in domain.intervals:
        inside = (arr > a) & (arr < b)
        out = np.where(inside, np.minimum(arr - a, b - arr), out)
    if out.ndim == 0:
        return float(out)
    return out


def boundary_points(domain: Domain1D) -> tuple[BoundaryPoint1D, ...]:
    """All 2*I boundary points with outward normals, left to right."""
    pts = []
    for i, (a, b) in enumerate(domain.intervals):
        pts.append(BoundaryPoint1D(x=a, normal=-1, side="left", interval_index=i))
        pts.append(BoundaryPoint1D(x=b, normal=+1, side="right", interval_index=i))
    return tuple(pts)


def _grading(n: int, beta: float) -> np.ndarray:
    """sigma(j/n) for j = 0..n with sigma(t) = t^b / (t^b + (1-t)^b).

    The second half mirrors the first exactly so symmetric domains receive
    bitwise-symmetric meshes.
    """
    t = np.arange(n + 1) / n
    with np.errstate(invalid="ignore"):
        num = t**beta
        den = num + (1.0 - t) ** beta
        sig = num / den
    half = (n + 1) // 2
    idx = np.arange(half)
    sig[n - idx] = 1.0 - sig[idx]
    if n % 2 == 0:
        sig[n // 2] = 0.5
    sig[0] = 0.0
    sig[n] = 1.0
    return sig


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Per-interval node arrays plus flat element/dof tables.

    Hash/eq are by identity so meshes can key caches of derived tables.

    Interior nodes carry the P1 hat basis (Dirichlet: boundary hats are
    dropped).  All arrays are read-only after construction.

    Attributes
    ----------
    nodes : tuple of ndarray
        Node coordinates per interval, endpoints included.
    elem_x0, elem_x1, elem_h : ndarray
        Element endpoints and sizes, all intervals concatenated
        left-to-right.
    elem_interval : ndarray
        Interval index of each element.
    elem_dof : ndarray, shape (E, 2)
        Global interior-dof index of the element's left/right node, -1 for
        boundary nodes.
    interior_x : ndarray
        Coordinates of the interior nodes (= dof ordering).
    """

    domain: Domain1D
    beta: float
    nodes: tuple[np.ndarray, ...]
    elem_x0: np.ndarray = field(repr=False)
    elem_x1: np.ndarray = field(repr=False)
    elem_h: np.ndarray = field(repr=False)
    elem_interval: np.ndarray = field(repr=False)
    elem_dof: np.ndarray = field(repr=False)
    interior_x: np.ndarray = field(repr=False)
    dof_interval: np.ndarray = field(repr=False)

    @property
    def n_interior(self) -> int:
        return self.interior_x.size

    @property
    def n_per_interval(self) -> tuple[int, ...]:
        return tuple(len(nd) - 1 for nd in self.nodes)

    def interior_to_full(self, u: np.ndarray) -> tuple[np.ndarray, ...]:
        """Embed an interior-dof vector as per-interval nodal arrays with zero ends."""
        out = []
        pos = 0
        for nd in self.nodes:
            n_int = len(nd) - 2
            full = np.zeros(len(nd))
            full[1:-1] = u[pos : pos + n_int]
            pos += n_int
            out.append(full)
        return tuple(out)

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        xs = np.concatenate(self.nodes)
        scale = max(abs(xs[0]), abs(xs[-1]), 1.0)
        return bool(np.all(np.abs(xs + xs[::-1]) <= tol * scale))


def make_mesh(domain: Domain1D, n_per_interval: int, beta: float = 2.0) -> Mesh1D:
    """Graded mesh with ``n_per_interval`` elements on every interval.

    Requires n_per_interval >= 2 (at least one interior node per interval)
    and beta >= 1; beta = 1 is the uniform mesh.
    """
    n = int(n_per_interval)
    if n < 2:
        raise ArgumentError(f"n_per_interval must be >= 2, got {n_per_interval}")
    if not (beta >= 1.0):
        raise ArgumentError(f"beta must be >= 1, got {beta}")
    sig = _grading(n, float(beta))
    nodes = []
    for a, b in domain.intervals:
        nd = a + (b - a) * sig
        nd[0] = a
        nd[-1] = b
        nd.flags.writeable = False
        nodes.append(nd)

    ex0, ex1, eiv, edof_l, edof_r = [], [], [], [], []
    interior, div = [], []
    dof = 0
    for i, nd in enumerate(nodes):
        for j in range(len(nd) - 1):
            ex0.append(nd[j])
            ex1.append(nd[j + 1])
            eiv.append(i)
            edof_l.append(dof + j - 1 if j > 0 else -1)
            edof_r.append(dof + j if j < len(nd) - 2 else -1)
        interior.append(nd[1:-1])
        div.append(np.full(len(nd) - 2, i))
        dof += len(nd) - 2

    def _arr(v, dtype=float):
        a = np.asarray(v, dtype=dtype)
        a.flags.writeable = False
        return a

    elem_x0 = _arr(ex0)
    elem_x1 = _arr(ex1)
    elem_h = _arr(elem_x1 - elem_x0)
    return Mesh1D(
        domain=domain,
        beta=float(beta),
        nodes=tuple(nodes),
        elem_x0=elem_x0,
        elem_x1=elem_x1,
        elem_h=elem_h,
        elem_interval=_arr(eiv, int),
        elem_dof=_arr(np.column_stack([edof_l, edof_r]), int),
        interior_x=_arr(np.concatenate(interior)),
        dof_interval=_arr(np.concatenate(div), int),
    )


def perturb_endpoint(domain: Domain1D, bp: BoundaryPoint1D, eps: float) -> Domain1D:
    """Move one boundary point by ``eps`` along its outward normal.

    eps > 0 enlarges the domain.  Raises DomainCollisionError when the
    moved endpoint would degenerate its interval or hit a neighbour.
    """
    ivs = [list(iv) for iv in domain.intervals]
    i = bp.interval_index
    if bp.side == "left":
        ivs[i][0] = bp.x - eps * 1.0
    else:
        ivs[i][1] = bp.x + eps * 1.0
    try:
        return make_domain(ivs)
    except (OverlapError, DegenerateError) as exc:
        raise DomainCollisionError(str(exc)) from exc


@dataclass(frozen=True)
class ImplicitDomain2D:
    """2D domain {g < 0} inside a bounding box, given by a closed-form g."""

    source: str
    g: Expr
    bbox: tuple[float, float, float, float]  # (xmin, xmax, ymin, ymax)

    def evaluate(self, x, y):
        return self.g.evaluate({"x": np.asarray(x, float), "y": np.asarray(y, float)})


def make_implicit_domain(g: str, bbox: Sequence[float]) -> ImplicitDomain2D:
    if len(bbox) != 4:
        raise ArgumentError("bbox must be (xmin, xmax, ymin, ymax)")
    xmin, xmax, ymin, ymax = map(float, bbox)
    if not (xmax > xmin and ymax > ymin):
        raise ArgumentError("bbox must have positive extent")
    expr = parse_expression(g)
    return ImplicitDomain2D(source=g, g=expr, bbox=(xmin, xmax, ymin, ymax))


def _bisect_roots(f, lo, hi, flo, steps=60):
    """Vectorized bisection on bracketing intervals; returns midpoints."""
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        left = flo * fm <= 0.0
        hi = np.where(left, mid, hi)
        flo_new = np.where(left, flo, fm)
        lo = np.where(left, lo, mid)
        flo = flo_new
    return 0.5 * (lo + hi)


def sample_boundary_2d(dom: ImplicitDomain2D, m: int, grad_tol: float = 1e-8):
    """Sample points on {g = 0} with outward unit normals.

    Scans the m x m grid over the bounding box for sign changes along both
    grid-line directions and bisects each bracket for 60 steps.  Normals
    are grad g / |grad g| by central differences with step 1e-6 times the
    box diagonal (g < 0 inside, so the gradient points outward).  The grid
    is densified (up to 3 doublings) if it yields fewer than m points.

    Returns a list of ((x, y), (nx, ny)) float tuples.
    Raises NoBoundaryError when no sign change is found and
    SingularGradientError when |grad g| < grad_tol at a sampled point.
    """
    if m < 2:
        raise ArgumentError("m must be >= 2")
    xmin, xmax, ymin, ymax = dom.bbox
    diag = float(np.hypot(xmax - xmin, ymax - ymin))
    step = 1e-6 * diag

    pts_x: list[np.ndarray] = []
    pts_y: list[np.ndarray] = []
    grid = int(m)
    for _attempt in range(4):
        pts_x.clear()
        pts_y.clear()
        xs = np.linspace(xmin, xmax, grid)
        ys = np.linspace(ymin, ymax, grid)
        X, Y = np.meshgrid(xs, ys, indexing="xy")
        G = dom.evaluate(X, Y)

        # horizontal sweeps: roots in x between consecutive grid columns
        br = G[:, :-1] * G[:, 1:] < 0.0
        if np.any(br):
            ii, jj = np.nonzero(br)
            yfix = ys[ii]
            root = _bisect_roots(
                lambda t, yf=yfix: dom.evaluate(t, yf), X[ii, jj], X[ii, jj + 1], G[ii, jj]
            )
            pts_x.append(root)
            pts_y.append(yfix)
        # vertical sweeps: roots in y between consecutive grid rows
        br = G[:-1, :] * G[1:, :] < 0.0
        if np.any(br):
            ii, jj = np.nonzero(br)
            xfix = xs[jj]
            root = _bisect_roots(
                lambda t, xf=xfix: dom.evaluate(xf, t), Y[ii, jj], Y[ii + 1, jj], G[ii, jj]
            )
            pts_x.append(xfix)
            pts_y.append(root)
        count = sum(a.size for a in pts_x)
        if count >= m:
            break
        grid *= 2
    if not pts_x:
        raise NoBoundaryError("no sign change of g on the sampling grid")

    px = np.concatenate(pts_x)
    py = np.concatenate(pts_y)
    gx = (dom.evaluate(px + step, py) - dom.evaluate(px - step, py)) / (2 * step)
    gy = (dom.evaluate(px, py + step) - dom.evaluate(px, py - step)) / (2 * step)
    norm = np.hypot(gx, gy)
    if np.any(norm < grad_tol):
        k = int(np.argmin(norm))
        raise SingularGradientError(
            f"|grad g| = {norm[k]:.3e} < {grad_tol} at ({px[k]:.6f}, {py[k]:.6f})"
        )
    return [
        ((float(x), float(y)), (float(nx / nn), float(ny / nn)))
        for x, y, nx, ny, nn in zip(px, py, gx, gy, norm)
    ]


def domain_to_json(domain) -> dict:
    """JSON form: {"intervals": [[a, b], ...]} or {"implicit2d": {...}}."""
    if isinstance(domain, Domain1D):
        return {"intervals": [[a, b] for a, b in domain.intervals]}
    if isinstance(domain, ImplicitDomain2D):
        return {"implicit2d": {"g": domain.source, "bbox": list(domain.bbox)}}
    raise ArgumentError(f"cannot serialize {type(domain).__name__}")


def domain_from_json(obj: dict):
    """Inverse of :func:`domain_to_json`."""
    if not isinstance(obj, dict):
        raise ArgumentError("domain JSON must be an object")
    if "intervals" in obj:
        return make_domain(obj["intervals"])
    if "implicit2d" in obj:
        spec = obj["implicit2d"]
        return make_implicit_domain(spec["g"], spec["bbox"])
    raise ArgumentError("domain JSON needs 'intervals' or 'implicit2d'")
