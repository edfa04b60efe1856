"""Hot per-point least-squares kernels: numba fast path, pure-numpy fallback.

Two families of kernels live here because they dominate runtime (they are
rebuilt after every point-management pass, i.e. every time step):

* ``stencil_rows``: weighted least-squares derivative weights (d/dx, d/dy,
  Laplacian) on a quadratic monomial basis, one row per point.
* ``mls_rows``: moving-least-squares value weights with a linear basis,
  one row per interpolation target.

The implementation is selected once at import time.  Setting the
environment variable ``FBCONTROL_NUMBA=0`` (or ``off``/``false``) forces
the pure-numpy path; otherwise numba is used when importable.  Both
implementations are always importable under ``*_numpy`` / ``*_numba``
names so the benchmark and the parity tests can compare them directly.

Neighbourhoods are passed in CSR layout (``indptr``/``indices``) and the
returned weight arrays share that layout.  All math is float64.
"""

from __future__ import annotations

import os

import numpy as np

# Relative singular-value cutoff below which a local basis counts as rank
# deficient.  Shared by both paths so they flag the same points.
RCOND = 1e-10

# Targets closer than SNAP_REL * local scale to a source point copy the
# nodal value exactly instead of fitting (MLS is not interpolatory).
SNAP_REL = 1e-9


def _padded(indptr: np.ndarray, indices: np.ndarray):
    """CSR neighbour lists as a padded (n, kmax) matrix plus validity mask."""
    counts = np.diff(indptr)
    n = counts.shape[0]
    kmax = int(counts.max()) if n else 0
    mask = np.arange(kmax)[None, :] < counts[:, None]
    pad = np.zeros((n, kmax), dtype=np.int64)
    pad[mask] = indices
    return pad, mask, counts


def stencil_rows_numpy(pos, indptr, indices, scale):
    """Batched-numpy derivative weights.

    Returns ``(dxw, dyw, lapw, ok)`` where the weight arrays align with
    ``indices`` and ``ok`` flags points whose local basis had full rank.
    """
    pad, mask, counts = _padded(indptr, indices)
    d = pos[pad] - pos[:, None, :]
    s = scale[:, None]
    xi = d[..., 0] / s
    eta = d[..., 1] / s
    w = np.exp(-2.0 * (xi * xi + eta * eta)) * mask
    sw = np.sqrt(w)
    basis = np.stack(
        [np.ones_like(xi), xi, eta, xi * xi, xi * eta, eta * eta], axis=-1
    )
    a = basis * sw[..., None]
    u, sig, vt = np.linalg.svd(a, full_matrices=False)
    smax = sig[:, 0]
    ok = (counts >= 6) & (sig[:, -1] > RCOND * np.maximum(smax, 1e-300))
    sinv = np.where(sig > RCOND * smax[:, None], 1.0 / np.maximum(sig, 1e-300), 0.0)
    # pinv of a: rows m give the weight row of basis coefficient m
    pinv = np.einsum("nlm,nl,nkl->nmk", vt, sinv, u)
    dxw = pinv[:, 1, :] * sw / s
    dyw = pinv[:, 2, :] * sw / s
    lapw = 2.0 * (pinv[:, 3, :] + pinv[:, 5, :]) * sw / (s * s)
    return dxw[mask], dyw[mask], lapw[mask], ok


def mls_rows_numpy(src_pos, tgt_pos, indptr, indices, scale):
    """Batched-numpy MLS value weights (linear basis, Gaussian weight).

    Returns ``(valw, ok)``; ``ok`` is False for targets with no source
    neighbour in range.  Targets sitting on a source point get an exact
    single-entry row.
    """
    pad, mask, counts = _padded(indptr, indices)
    d = src_pos[pad] - tgt_pos[:, None, :]
    s = scale[:, None]
    xi = d[..., 0] / s
    eta = d[..., 1] / s
    r2 = xi * xi + eta * eta
    w = np.exp(-2.0 * r2) * mask
    sw = np.sqrt(w)
    basis = np.stack([np.ones_like(xi), xi, eta], axis=-1)
    a = basis * sw[..., None]
    u, sig, vt = np.linalg.svd(a, full_matrices=False)
    smax = np.maximum(sig[:, 0], 1e-300)
    sinv = np.where(sig > RCOND * smax[:, None], 1.0 / np.maximum(sig, 1e-300), 0.0)
    pinv = np.einsum("nlm,nl,nkl->nmk", vt, sinv, u)
    valw = pinv[:, 0, :] * sw
    # snap to node where a target coincides with a source point
    r2snap = np.where(mask, r2, np.inf)
    jmin = np.argmin(r2snap, axis=1)
    dmin = np.sqrt(np.take_along_axis(r2snap, jmin[:, None], axis=1)[:, 0]) * scale
    snap = (counts > 0) & (dmin < SNAP_REL * scale)
    if np.any(snap):
        rows = np.where(snap)[0]
        valw[rows] = 0.0
        valw[rows, jmin[rows]] = 1.0
    ok = counts > 0
    return valw[mask], ok


def _make_numba_kernels():
    import numba

    @numba.njit(cache=True)
    def _stencil_rows(pos, indptr, indices, scale, rcond):
        n = pos.shape[0]
        nnz = indices.shape[0]
        dxw = np.zeros(nnz)
        dyw = np.zeros(nnz)
        lapw = np.zeros(nnz)
        ok = np.ones(n, dtype=np.bool_)
        for i in range(n):
            lo = indptr[i]
            hi = indptr[i + 1]
            k = hi - lo
            if k < 6:
                ok[i] = False
                continue
            s = scale[i]
            a = np.empty((k, 6))
            sw = np.empty(k)
            for jj in range(k):
                j = indices[lo + jj]
                xi = (pos[j, 0] - pos[i, 0]) / s
                eta = (pos[j, 1] - pos[i, 1]) / s
                wgt = np.exp(-2.0 * (xi * xi + eta * eta))
                swj = np.sqrt(wgt)
                sw[jj] = swj
                a[jj, 0] = swj
                a[jj, 1] = swj * xi
                a[jj, 2] = swj * eta
                a[jj, 3] = swj * xi * xi
                a[jj, 4] = swj * xi * eta
                a[jj, 5] = swj * eta * eta
            u, sig, vt = np.linalg.svd(a, full_matrices=False)
            smax = sig[0]
            if sig[5] <= rcond * smax:
                ok[i] = False
            for jj in range(k):
                c1 = 0.0
                c2 = 0.0
                c3 = 0.0
                c5 = 0.0
                for l in range(6):
                    if sig[l] > rcond * smax:
                        f = u[jj, l] / sig[l]
                        c1 += vt[l, 1] * f
                        c2 += vt[l, 2] * f
                        c3 += vt[l, 3] * f
                        c5 += vt[l, 5] * f
                dxw[lo + jj] = c1 * sw[jj] / s
                dyw[lo + jj] = c2 * sw[jj] / s
                lapw[lo + jj] = 2.0 * (c3 + c5) * sw[jj] / (s * s)
        return dxw, dyw, lapw, ok

    @numba.njit(cache=True)
    def _mls_rows(src_pos, tgt_pos, indptr, indices, scale, rcond, snap_rel):
        m = tgt_pos.shape[0]
        nnz = indices.shape[0]
        valw = np.zeros(nnz)
        ok = np.ones(m, dtype=np.bool_)
        for i in range(m):
            lo = indptr[i]
            hi = indptr[i + 1]
            k = hi - lo
            if k == 0:
                ok[i] = False
                continue
            s = scale[i]
            a = np.empty((k, 3))
            sw = np.empty(k)
            dmin = 1e300
            jmin = 0
            for jj in range(k):
                j = indices[lo + jj]
                dx = src_pos[j, 0] - tgt_pos[i, 0]
                dy = src_pos[j, 1] - tgt_pos[i, 1]
                dist = np.sqrt(dx * dx + dy * dy)
                if dist < dmin:
                    dmin = dist
                    jmin = jj
                xi = dx / s
                eta = dy / s
                wgt = np.exp(-2.0 * (xi * xi + eta * eta))
                swj = np.sqrt(wgt)
                sw[jj] = swj
                a[jj, 0] = swj
                a[jj, 1] = swj * xi
                a[jj, 2] = swj * eta
            if dmin < snap_rel * s:
                valw[lo + jmin] = 1.0
                continue
            u, sig, vt = np.linalg.svd(a, full_matrices=False)
            ncols = sig.shape[0]
            smax = sig[0]
            for jj in range(k):
                c0 = 0.0
                for l in range(ncols):
                    if sig[l] > rcond * smax:
                        c0 += vt[l, 0] * u[jj, l] / sig[l]
                valw[lo + jj] = c0 * sw[jj]
        return valw, ok

    def stencil_rows_numba(pos, indptr, indices, scale):
        return _stencil_rows(
            np.ascontiguousarray(pos, dtype=np.float64),
            indptr.astype(np.int64),
            indices.astype(np.int64),
            np.ascontiguousarray(scale, dtype=np.float64),
            RCOND,
        )

    def mls_rows_numba(src_pos, tgt_pos, indptr, indices, scale):
        return _mls_rows(
            np.ascontiguousarray(src_pos, dtype=np.float64),
            np.ascontiguousarray(tgt_pos, dtype=np.float64),
            indptr.astype(np.int64),
            indices.astype(np.int64),
            np.ascontiguousarray(scale, dtype=np.float64),
            RCOND,
            SNAP_REL,
        )

    return stencil_rows_numba, mls_rows_numba


def _numba_requested() -> bool:
    flag = os.environ.get("FBCONTROL_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


stencil_rows_numba = None
mls_rows_numba = None
USING_NUMBA = False

if _numba_requested():
    try:
        stencil_rows_numba, mls_rows_numba = _make_numba_kernels()
        USING_NUMBA = True
    except ImportError:
        USING_NUMBA = False

if USING_NUMBA:
    stencil_rows = stencil_rows_numba
    mls_rows = mls_rows_numba
else:
    stencil_rows = stencil_rows_numpy
    mls_rows = mls_rows_numpy
