"""Moving domains as classified point clouds.

A domain snapshot is a :class:`PointCloud`: scattered positions tagged as
interior (kind 0) or boundary segment (kind > 0), with outward unit
normals on boundary points and per-point quadrature weights (cell area
for interior points, arclength for boundary points).  Fields are plain
numpy arrays aligned with the cloud's points: shape ``(n,)`` for scalars,
``(n, 2)`` for vectors.

Clouds are immutable after construction (arrays are marked read-only);
every operation returns a new cloud.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree

from ._neighbors import neighbors_csr
from .exceptions import (
    ConfigError,
    DegenerateBoundaryError,
    FoldOverError,
    SeedError,
    UnknownSegmentError,
)
from . import kernels

INTERIOR = 0


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid with ``n_steps * tau == t_final``."""

    t_final: float
    tau: float
    n_steps: int

    def times(self):
        return self.tau * np.arange(self.n_steps + 1)


def make_time_grid(t_final: float, tau: float) -> TimeGrid:
    if t_final <= 0 or tau <= 0:
        raise ConfigError(f"t_final and tau must be positive, got {t_final}, {tau}")
    ratio = t_final / tau
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise ConfigError(
            f"t_final/tau = {ratio!r} is not an integer number of steps"
        )
    return TimeGrid(t_final=float(t_final), tau=float(tau), n_steps=n)


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle with one segment id per edge."""

    x0: float
    y0: float
    width: float
    height: float
    # ids for (bottom, right, top, left)
    edge_ids: tuple = (1, 2, 3, 4)
    segments: dict = field(
        default_factory=lambda: {"bottom": 1, "right": 2, "top": 3, "left": 4}
    )


def square(edge: float) -> Rectangle:
    """Square of the given edge length centered at the origin."""
    return Rectangle(x0=-edge / 2.0, y0=-edge / 2.0, width=edge, height=edge)


@dataclass(frozen=True)
class Circle:
    """Disk used mostly as a test fixture; single boundary segment."""

    radius: float
    center: tuple = (0.0, 0.0)
    boundary_id: int = 1
    segments: dict = field(default_factory=lambda: {"boundary": 1})


TANK_SEGMENTS = {"wall": 1, "free_surface": 2, "inlet": 3, "outlet": 4}


@dataclass(frozen=True)
class Tank:
    """Open liquid tank: walls, free surface on top, inlet/outlet spans.

    The inlet is a span of the left wall, the outlet a span of the right
    wall; the top edge (minus its corners) is the free surface.  All other
    boundary points are walls.
    """

    width: float = 5.0
    height: float = 5.0
    inlet: tuple = (1.0, 2.0)
    outlet: tuple = (1.0, 2.0)
    segments: dict = field(default_factory=lambda: dict(TANK_SEGMENTS))


# ---------------------------------------------------------------------------
# point cloud


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Scattered representation of one domain snapshot."""

    positions: np.ndarray  # (n, 2)
    kind: np.ndarray  # (n,), 0 interior, >0 boundary segment id
    normals: np.ndarray  # (n, 2), zero rows on interior points
    spacing: float  # nominal inter-point distance h
    weights: np.ndarray  # (n,), area (interior) / arclength (boundary)
    segments: dict = field(default_factory=dict)  # segment name -> id

    def __post_init__(self):
        object.__setattr__(self, "positions", _readonly(np.asarray(self.positions, float)))
        object.__setattr__(self, "kind", _readonly(np.asarray(self.kind, np.int64)))
        object.__setattr__(self, "normals", _readonly(np.asarray(self.normals, float)))
        object.__setattr__(self, "weights", _readonly(np.asarray(self.weights, float)))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def interior_mask(self) -> np.ndarray:
        return self.kind == INTERIOR

    @property
    def boundary_mask(self) -> np.ndarray:
        return self.kind != INTERIOR

    def segment_mask(self, segment) -> np.ndarray:
        """Mask for a segment given by id, name, or None for full boundary."""
        if segment is None or segment == "all":
            return self.boundary_mask
        if isinstance(segment, str):
            if segment not in self.segments:
                raise UnknownSegmentError(
                    f"unknown segment {segment!r}; have {sorted(self.segments)}"
                )
            segment = self.segments[segment]
        segment = int(segment)
        known = set(np.unique(self.kind[self.boundary_mask]).tolist())
        known |= set(self.segments.values())
        if segment not in known:
            raise UnknownSegmentError(f"unknown segment id {segment}; have {sorted(known)}")
        return self.kind == segment


def _estimate_weights(positions, kind):
    """Quadrature weights from nearest-neighbour spacing.

    Interior: (median distance to up to 4 nearest interior points)^2.
    Boundary: half the summed distance to the 2 nearest boundary points.
    """
    n = positions.shape[0]
    weights = np.zeros(n)
    interior = kind == INTERIOR
    boundary = ~interior
    ipos = positions[interior]
    if ipos.shape[0] >= 2:
        k = min(5, ipos.shape[0])
        d, _ = cKDTree(ipos).query(ipos, k=k)
        hloc = np.median(d[:, 1:], axis=1)
        weights[interior] = hloc**2
    elif ipos.shape[0] == 1:
        # lone interior point: fall back to boundary distances
        bpos = positions[boundary]
        d, _ = cKDTree(bpos).query(ipos, k=min(2, bpos.shape[0]))
        weights[interior] = np.mean(np.atleast_2d(d)) ** 2
    bpos = positions[boundary]
    if bpos.shape[0] >= 3:
        d, _ = cKDTree(bpos).query(bpos, k=3)
        weights[boundary] = 0.5 * (d[:, 1] + d[:, 2])
    elif bpos.shape[0] > 0:
        weights[boundary] = 1.0
    return weights


def _make_cloud(positions, kind, spacing, segments, weights=None):
    positions = np.asarray(positions, float)
    kind = np.asarray(kind, np.int64)
    if weights is None:
        weights = _estimate_weights(positions, kind)
    cloud = PointCloud(
        positions=positions,
        kind=kind,
        normals=np.zeros_like(positions),
        spacing=float(spacing),
        weights=weights,
        segments=dict(segments),
    )
    return outward_normals(cloud)


# ---------------------------------------------------------------------------
# seeding


def _seed_rectangle_boundary(x0, y0, w, h, nx, ny, edge_ids):
    sx, sy = w / nx, h / ny
    pts, kinds = [], []
    bottom, right, top, left = edge_ids
    for i in range(nx):
        pts.append((x0 + i * sx, y0))
        kinds.append(bottom)
    for j in range(ny):
        pts.append((x0 + w, y0 + j * sy))
        kinds.append(right)
    for i in range(nx):
        pts.append((x0 + w - i * sx, y0 + h))
        kinds.append(top)
    for j in range(ny):
        pts.append((x0, y0 + h - j * sy))
        kinds.append(left)
    return np.array(pts), np.array(kinds, np.int64)


def seed_cloud(shape, h: float) -> PointCloud:
    """Fill a shape with points at nominal spacing ``h``.

    Boundary points lie on the shape boundary at spacing ~h; interior
    points fill the inside on a lattice.  Kinds, outward normals and
    quadrature weights are set.
    """
    if h <= 0:
        raise SeedError(f"spacing must be positive, got {h}")
    if isinstance(shape, Rectangle):
        if h > min(shape.width, shape.height):
            raise SeedError(
                f"spacing {h} exceeds the rectangle extent "
                f"{min(shape.width, shape.height)}"
            )
        nx = max(1, round(shape.width / h))
        ny = max(1, round(shape.height / h))
        bpos, bkind = _seed_rectangle_boundary(
            shape.x0, shape.y0, shape.width, shape.height, nx, ny, shape.edge_ids
        )
        sx, sy = shape.width / nx, shape.height / ny
        xs = shape.x0 + sx * np.arange(1, nx)
        ys = shape.y0 + sy * np.arange(1, ny)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        ipos = np.column_stack([gx.ravel(), gy.ravel()])
        pos = np.vstack([ipos, bpos])
        kind = np.concatenate([np.zeros(len(ipos), np.int64), bkind])
        weights = np.concatenate(
            [np.full(len(ipos), sx * sy), np.zeros(len(bpos))]
        )
        weights[len(ipos):] = _estimate_weights(pos, kind)[len(ipos):]
        return _make_cloud(pos, kind, h, shape.segments, weights)
    if isinstance(shape, Circle):
        r = shape.radius
        if h > r:
            raise SeedError(f"spacing {h} exceeds the circle radius {r}")
        cx, cy = shape.center
        m = max(4, round(2 * np.pi * r / h))
        ang = 2 * np.pi * np.arange(m) / m
        bpos = np.column_stack([cx + r * np.cos(ang), cy + r * np.sin(ang)])
        ticks = np.arange(-np.floor(r / h), np.floor(r / h) + 1) * h
        gx, gy = np.meshgrid(cx + ticks, cy + ticks, indexing="ij")
        ipos = np.column_stack([gx.ravel(), gy.ravel()])
        rad = np.hypot(ipos[:, 0] - cx, ipos[:, 1] - cy)
        ipos = ipos[rad < r - 0.1 * h]
        pos = np.vstack([ipos, bpos])
        kind = np.concatenate(
            [np.zeros(len(ipos), np.int64), np.full(m, shape.boundary_id, np.int64)]
        )
        weights = np.concatenate(
            [np.full(len(ipos), h * h), np.full(m, 2 * np.pi * r / m)]
        )
        return _make_cloud(pos, kind, h, shape.segments, weights)
    if isinstance(shape, Tank):
        rect = Rectangle(0.0, 0.0, shape.width, shape.height)
        base = seed_cloud(rect, h)
        seg = shape.segments
        kind = base.kind.copy()
        pos = base.positions
        on_top = base.boundary_mask & np.isclose(pos[:, 1], shape.height)
        on_left = base.boundary_mask & np.isclose(pos[:, 0], 0.0)
        on_right = base.boundary_mask & np.isclose(pos[:, 0], shape.width)
        corner = (on_left | on_right) & (
            np.isclose(pos[:, 1], 0.0) | np.isclose(pos[:, 1], shape.height)
        )
        kind[base.boundary_mask] = seg["wall"]
        kind[on_top & ~on_left & ~on_right] = seg["free_surface"]
        lo, hi = shape.inlet
        kind[on_left & ~corner & (pos[:, 1] >= lo - 1e-12) & (pos[:, 1] <= hi + 1e-12)] = seg["inlet"]
        lo, hi = shape.outlet
        kind[on_right & ~corner & (pos[:, 1] >= lo - 1e-12) & (pos[:, 1] <= hi + 1e-12)] = seg["outlet"]
        return _make_cloud(pos, kind, h, seg, base.weights.copy())
    raise SeedError(f"unsupported shape {type(shape).__name__}")


# ---------------------------------------------------------------------------
# normals


def outward_normals(cloud: PointCloud) -> PointCloud:
    """Recompute outward unit normals from local boundary line fits.

    The tangent at a boundary point is the principal direction of its
    (Gaussian-weighted) boundary neighbours, preferring neighbours on the
    same segment; orientation is fixed by majority vote against nearby
    interior points.
    """
    pos = cloud.positions
    kind = cloud.kind
    h = cloud.spacing
    normals = np.zeros_like(pos)
    b_idx = np.where(cloud.boundary_mask)[0]
    if b_idx.size == 0:
        return replace(cloud, normals=normals)
    bpos = pos[b_idx]
    bkind = kind[b_idx]
    btree = cKDTree(bpos)
    i_idx = np.where(cloud.interior_mask)[0]
    itree = cKDTree(pos[i_idx]) if i_idx.size else None
    centroid = pos.mean(axis=0)
    k_query = min(12, b_idx.size)
    dists, nbrs = btree.query(bpos, k=k_query)
    dists = np.atleast_2d(dists)
    nbrs = np.atleast_2d(nbrs)
    for row, gi in enumerate(b_idx):
        cand = nbrs[row][(dists[row] < 3.2 * h) & (nbrs[row] != row)]
        same = cand[bkind[cand] == bkind[gi]]
        use = same if same.size >= 2 else cand
        if use.size < 2:
            raise DegenerateBoundaryError(
                f"boundary point {gi} at {pos[gi]} has {use.size} boundary "
                "neighbours; need at least 2 for a normal fit"
            )
        local = bpos[use] - pos[gi]
        w = np.exp(-2.0 * np.sum(local**2, axis=1) / h**2)
        mean = (w[:, None] * local).sum(axis=0) / w.sum()
        centered = local - mean
        cov = (w[:, None] * centered).T @ centered
        _, vecs = np.linalg.eigh(cov)
        tangent = vecs[:, -1]
        nrm = np.array([-tangent[1], tangent[0]])
        if itree is not None:
            kq = min(8, i_idx.size)
            di, ii = itree.query(pos[gi], k=kq)
            di = np.atleast_1d(di)
            ii = np.atleast_1d(ii)
            near = ii[di < 4.0 * h]
            if near.size:
                votes = np.sign((pos[gi] - pos[i_idx[near]]) @ nrm)
                if votes.sum() < 0:
                    nrm = -nrm
                normals[gi] = nrm
                continue
        if (pos[gi] - centroid) @ nrm < 0:
            nrm = -nrm
        normals[gi] = nrm
    return replace(cloud, normals=normals)


# ---------------------------------------------------------------------------
# transforms


def _displacement_jacobians(positions, disp, h):
    """Per-point linear least-squares Jacobian of a displacement field."""
    indptr, indices, _ = neighbors_csr(positions, positions, 2.5 * h, min_count=4)
    counts = np.diff(indptr)
    kmax = counts.max()
    mask = np.arange(kmax)[None, :] < counts[:, None]
    pad = np.zeros((positions.shape[0], kmax), np.int64)
    pad[mask] = indices
    d = (positions[pad] - positions[:, None, :]) / h
    w = np.exp(-2.0 * np.sum(d**2, axis=2)) * mask
    # weighted normal equations for basis {1, xi, eta}
    ones = np.ones_like(d[..., 0]) * mask
    b = np.stack([ones, d[..., 0], d[..., 1]], axis=-1)
    m = np.einsum("nk,nki,nkj->nij", w, b, b)
    rhs = np.einsum("nk,nki,nkc->nic", w, b, disp[pad])
    m += 1e-14 * np.eye(3)
    coef = np.linalg.solve(m, rhs)  # (n, 3, 2): rows 1,2 are d/dxi, d/deta
    jac = np.transpose(coef[:, 1:, :], (0, 2, 1)) / h  # (n, 2, 2), J[c, d]
    return jac


def apply_transform(cloud: PointCloud, displacement: np.ndarray) -> PointCloud:
    """Move every point by its displacement; error on orientation loss.

    Kinds are preserved, normals recomputed, and quadrature weights
    re-estimated.  The per-point least-squares Jacobian of the
    displacement must keep ``det(I + J) > 0`` everywhere.
    """
    displacement = np.asarray(displacement, float)
    if displacement.shape != cloud.positions.shape:
        raise ConfigError(
            f"displacement shape {displacement.shape} does not match cloud "
            f"({cloud.positions.shape})"
        )
    if np.any(displacement):
        jac = _displacement_jacobians(cloud.positions, displacement, cloud.spacing)
        det = (1.0 + jac[:, 0, 0]) * (1.0 + jac[:, 1, 1]) - jac[:, 0, 1] * jac[:, 1, 0]
        if np.any(det <= 0.0):
            i = int(np.argmin(det))
            raise FoldOverError(
                f"step map folds over at point {i} (det {det[i]:.3e} <= 0); "
                "reduce the time step"
            )
        new_pos = cloud.positions + displacement
    else:
        new_pos = cloud.positions.copy()
    moved = PointCloud(
        positions=new_pos,
        kind=cloud.kind,
        normals=cloud.normals,
        spacing=cloud.spacing,
        weights=_estimate_weights(new_pos, cloud.kind),
        segments=cloud.segments,
    )
    return outward_normals(moved)


# ---------------------------------------------------------------------------
# point management


def _chain_boundary(pos, b_idx):
    """Order boundary points along the closed curve by nearest-neighbour walk."""
    bpos = pos[b_idx]
    nb = len(b_idx)
    tree = cKDTree(bpos)
    visited = np.zeros(nb, bool)
    order = [0]
    visited[0] = True
    current = 0
    for _ in range(nb - 1):
        k = min(10, nb)
        d, idx = tree.query(bpos[current], k=k)
        nxt = -1
        for j in np.atleast_1d(idx):
            if not visited[j]:
                nxt = int(j)
                break
        if nxt < 0:
            remaining = np.where(~visited)[0]
            d = np.linalg.norm(bpos[remaining] - bpos[current], axis=1)
            nxt = int(remaining[np.argmin(d)])
        order.append(nxt)
        visited[nxt] = True
        current = nxt
    return np.asarray(order)


def _interpolate_values(src_cloud, src_fields, targets):
    """MLS field values at new points (used for inserted points)."""
    indptr, indices, _ = neighbors_csr(
        src_cloud.positions, targets, 2.5 * src_cloud.spacing, min_count=4
    )
    scale = np.full(targets.shape[0], src_cloud.spacing)
    valw, _ = kernels.mls_rows(src_cloud.positions, targets, indptr, indices, scale)
    out = []
    for f in src_fields:
        f = np.asarray(f, float)
        vals = np.zeros((targets.shape[0],) + f.shape[1:])
        for i in range(targets.shape[0]):
            sl = slice(indptr[i], indptr[i + 1])
            vals[i] = valw[sl] @ f[indices[sl]]
        out.append(vals)
    return out


def manage_points(cloud: PointCloud, h_min=None, h_max=None, fields=None):
    """Merge clustered points and fill holes; map fields along.

    Pairs closer than ``h_min`` merge (value-averaged; boundary points
    only merge with points of the same segment, interior points falling
    onto a boundary point are absorbed by it).  Interior holes wider than
    ``h_max`` are filled from a candidate lattice; stretched boundary
    segments are subdivided along the polyline.  Inserted points get
    MLS-interpolated (interior) or linearly interpolated (boundary)
    values.  Returns the cloud, or ``(cloud, fields)`` when fields are
    given; the input object is returned unchanged when nothing triggers.
    """
    h = cloud.spacing
    h_min = 0.4 * h if h_min is None else h_min
    h_max = 1.4 * h if h_max is None else h_max
    field_list = [np.asarray(f, float) for f in (fields or [])]

    pos = cloud.positions.copy()
    kind = cloud.kind.copy()
    vals = [f.copy() for f in field_list]
    changed = False

    # --- merge passes
    for _ in range(8):
        tree = cKDTree(pos)
        pairs = sorted(tree.query_pairs(h_min))
        if not pairs:
            break
        # prefer closest pairs first
        dist = [np.linalg.norm(pos[i] - pos[j]) for i, j in pairs]
        consumed = np.zeros(len(pos), bool)
        keep = np.ones(len(pos), bool)
        for _, (i, j) in sorted(zip(dist, pairs)):
            if consumed[i] or consumed[j]:
                continue
            ki, kj = kind[i], kind[j]
            if ki == INTERIOR and kj == INTERIOR:
                pos[i] = 0.5 * (pos[i] + pos[j])
                for f in vals:
                    f[i] = 0.5 * (f[i] + f[j])
                keep[j] = False
            elif ki != INTERIOR and kj != INTERIOR:
                if ki != kj:
                    continue  # never merge across segments
                pos[i] = 0.5 * (pos[i] + pos[j])
                for f in vals:
                    f[i] = 0.5 * (f[i] + f[j])
                keep[j] = False
            else:
                # absorb the interior point into the boundary point
                b, a = (i, j) if ki != INTERIOR else (j, i)
                for f in vals:
                    f[b] = 0.5 * (f[b] + f[a])
                keep[a] = False
            consumed[i] = consumed[j] = True
            changed = True
        pos = pos[keep]
        kind = kind[keep]
        vals = [f[keep] for f in vals]

    work = PointCloud(
        positions=pos,
        kind=kind,
        normals=np.zeros_like(pos),
        spacing=h,
        weights=np.ones(len(pos)),
        segments=cloud.segments,
    )

    # --- boundary subdivision along the chained polyline
    b_idx = np.where(kind != INTERIOR)[0]
    new_pos, new_kind, new_vals = [], [], []
    if b_idx.size >= 3:
        order = _chain_boundary(pos, b_idx)
        ring = b_idx[order]
        for a, b in zip(ring, np.roll(ring, -1)):
            if kind[a] != kind[b]:
                continue
            gap = np.linalg.norm(pos[b] - pos[a])
            if gap <= h_max or gap > 4.0 * h_max:
                continue
            n_new = int(np.ceil(gap / h)) - 1
            for m in range(1, n_new + 1):
                t = m / (n_new + 1)
                new_pos.append((1 - t) * pos[a] + t * pos[b])
                new_kind.append(kind[a])
                new_vals.append([(1 - t) * f[a] + t * f[b] for f in vals])

    # --- interior hole filling from a candidate lattice
    interior_exists = np.any(kind == INTERIOR)
    if interior_exists:
        lo = pos.min(axis=0)
        hi = pos.max(axis=0)
        xs = np.arange(lo[0] + 0.5 * h, hi[0], h)
        ys = np.arange(lo[1] + 0.5 * h, hi[1], h)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        cand = np.column_stack([gx.ravel(), gy.ravel()])
        tree = cKDTree(pos)
        d, nearest = tree.query(cand)
        open_ball = d > 0.75 * h_max
        cand = cand[open_ball]
        nearest = nearest[open_ball]
        accepted = []
        for c, nn in zip(cand, nearest):
            if kind[nn] != INTERIOR:
                nrm = cloud.normals[cloud.kind != INTERIOR]
                # re-derive the normal of that boundary point from the input
                # cloud if it survived; otherwise skip for safety
                match = np.where(
                    (cloud.positions == pos[nn]).all(axis=1) & (cloud.kind != INTERIOR)
                )[0]
                if match.size == 0:
                    continue
                nvec = cloud.normals[match[0]]
                if (c - pos[nn]) @ nvec > -0.3 * h:
                    continue
            if accepted and np.min(np.linalg.norm(np.asarray(accepted) - c, axis=1)) < 0.9 * h:
                continue
            accepted.append(c)
        if accepted:
            interp = _interpolate_values(
                PointCloud(pos, kind, np.zeros_like(pos), h, np.ones(len(pos)), cloud.segments),
                vals,
                np.asarray(accepted),
            )
            for row, c in enumerate(accepted):
                new_pos.append(c)
                new_kind.append(INTERIOR)
                new_vals.append([f[row] for f in interp])

    if new_pos:
        changed = True
        pos = np.vstack([pos, np.asarray(new_pos)])
        kind = np.concatenate([kind, np.asarray(new_kind, np.int64)])
        vals = [
            np.concatenate([f, np.asarray([nv[q] for nv in new_vals])])
            for q, f in enumerate(vals)
        ]

    if not changed:
        return (cloud, field_list) if fields is not None else cloud

    out = _make_cloud(pos, kind, h, cloud.segments)
    return (out, vals) if fields is not None else out


# ---------------------------------------------------------------------------
# quadrature


def volume_integral(cloud: PointCloud, f) -> float:
    """Interior quadrature sum of a scalar field."""
    f = np.asarray(f, float)
    m = cloud.interior_mask
    return float(np.sum(cloud.weights[m] * f[m]))


def boundary_integral(cloud: PointCloud, segment, f) -> float:
    """Arclength quadrature of a scalar field over one segment (or all)."""
    f = np.asarray(f, float)
    m = cloud.segment_mask(segment)
    return float(np.sum(cloud.weights[m] * f[m]))


# ---------------------------------------------------------------------------
# snapshots


def write_snapshot(path, cloud: PointCloud, step: int, time: float, fields=None):
    """Append-free CSV snapshot: header n,t,x,y,kind,nx,ny,<fields>."""
    fields = fields or {}
    cols = []
    names = []
    for name, values in fields.items():
        values = np.asarray(values, float)
        if values.ndim == 1:
            names.append(name)
            cols.append(values)
        else:
            for c in range(values.shape[1]):
                names.append(f"{name}_{'xy'[c] if c < 2 else c}")
                cols.append(values[:, c])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("n,t,x,y,kind,nx,ny" + "".join("," + n for n in names) + "\n")
        for i in range(cloud.n):
            row = [
                str(step),
                f"{time:.17g}",
                f"{cloud.positions[i, 0]:.17g}",
                f"{cloud.positions[i, 1]:.17g}",
                str(int(cloud.kind[i])),
                f"{cloud.normals[i, 0]:.17g}",
                f"{cloud.normals[i, 1]:.17g}",
            ]
            row += [f"{c[i]:.17g}" for c in cols]
            fh.write(",".join(row) + "\n")
