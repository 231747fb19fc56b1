"""Batch evaluation of ``a^g`` on many equal-degree paths.

Paths are flattened to int64 rows of global edge ids (``offset[color] + letter``)
in normal-form order.  The per-letter update is the orbit closed form used in
:mod:`rankbs.selfsim`, so a row costs O(length) regardless of ``|g|``.

Set ``RANKBS_NO_NUMBA=1`` to force the numpy implementation.  Inputs whose
restriction exponents could leave int64 are routed to the exact Python path by
the callers (see :func:`fits_int64`).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

USE_NUMBA = njit is not None and os.environ.get("RANKBS_NO_NUMBA", "").lower() not in ("1", "true", "yes")

_LIMIT = 2**62


class KernelTables:
    """Flattened orbit data of a :class:`~rankbs.selfsim.SelfSimilarKGraph`."""

    def __init__(self, ss):
        self.k = ss.k
        self.offsets = np.zeros(ss.k + 1, dtype=np.int64)
        for c, n in enumerate(ss.sizes):
            self.offsets[c + 1] = self.offsets[c] + n
        total = int(self.offsets[-1])
        self.orb_len = np.zeros(total, dtype=np.int64)
        self.orb_pos = np.zeros(total, dtype=np.int64)
        self.orb_sum = np.zeros(total, dtype=np.int64)
        self.mem_base = np.zeros(total, dtype=np.int64)
        self.pref_base = np.zeros(total, dtype=np.int64)
        members, pref = [], []
        self.max_abs_sum = 0
        self.max_abs_partial = 0
        self.min_len = None
        for per in ss.orbits:
            for orb in per:
                off = int(self.offsets[orb.color])
                L = orb.length
                mb, pb = len(members), len(pref)
                members.extend(off + s for s in orb.members + orb.members)
                pref.extend(orb.prefix)
                for q, s in enumerate(orb.members):
                    gid = off + s
                    self.orb_len[gid] = L
                    self.orb_pos[gid] = q
                    self.orb_sum[gid] = orb.total
                    self.mem_base[gid] = mb
                    self.pref_base[gid] = pb
                self.max_abs_sum = max(self.max_abs_sum, abs(orb.total))
                self.max_abs_partial = max(self.max_abs_partial, max(abs(x) for x in orb.prefix))
                self.min_len = L if self.min_len is None else min(self.min_len, L)
        self.members = np.asarray(members, dtype=np.int64)
        self.pref = np.asarray(pref, dtype=np.int64)

    def color_of(self, gid: int) -> int:
        return int(np.searchsorted(self.offsets, gid, side="right") - 1)


def fits_int64(tables: KernelTables, gmax: int, length: int) -> bool:
    """Conservative bound on every intermediate restriction along ``length`` letters."""
    b = abs(int(gmax))
    for _ in range(length):
        if b >= _LIMIT:
            return False
        b = (b // tables.min_len + 1) * tables.max_abs_sum + 2 * tables.max_abs_partial
    return b < _LIMIT


def _act_numpy(rows, g, orb_len, orb_pos, orb_sum, mem_base, pref_base, members, pref):
    out = np.empty_like(rows)
    h = g.copy()
    for t in range(rows.shape[1]):
        gid = rows[:, t]
        L = orb_len[gid]
        l = np.floor_divide(h, L)
        p = h - l * L
        q = orb_pos[gid]
        out[:, t] = members[mem_base[gid] + q + p]
        pb = pref_base[gid]
        h = l * orb_sum[gid] + pref[pb + q + p] - pref[pb + q]
    return out, h


if njit is not None:
    @njit(cache=True)
    def _act_numba(rows, g, orb_len, orb_pos, orb_sum, mem_base, pref_base, members, pref):
        n, T = rows.shape
        out = np.empty_like(rows)
        hout = np.empty_like(g)
        for i in range(n):
            h = g[i]
            for t in range(T):
                gid = rows[i, t]
                L = orb_len[gid]
                l = h // L
                p = h - l * L
                q = orb_pos[gid]
                out[i, t] = members[mem_base[gid] + q + p]
                pb = pref_base[gid]
                h = l * orb_sum[gid] + pref[pb + q + p] - pref[pb + q]
            hout[i] = h
        return out, hout
else:  # pragma: no cover
    _act_numba = None


def act_rows(tables: KernelTables, g, rows: np.ndarray, use_numba=None) -> tuple:
    """Apply ``a^g`` (scalar or per-row) to each row; returns ``(rows', restrictions)``."""
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    if rows.ndim != 2:
        raise ValueError("rows must be 2-dimensional")
    g = np.broadcast_to(np.asarray(g, dtype=np.int64), (rows.shape[0],)).copy()
    if rows.shape[1] == 0:
        return rows.copy(), g
    if use_numba is None:
        use_numba = USE_NUMBA
    fn = _act_numba if (use_numba and _act_numba is not None) else _act_numpy
    return fn(rows, g, tables.orb_len, tables.orb_pos, tables.orb_sum,
              tables.mem_base, tables.pref_base, tables.members, tables.pref)


def rank1_rows(n: int, depth: int) -> np.ndarray:
    """All words of length ``depth`` over ``[n]`` in lexicographic order, as rows."""
    if depth == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((n,) * depth).reshape(depth, -1).T
    return np.ascontiguousarray(grid, dtype=np.int64)


def paths_to_rows(tables: KernelTables, paths) -> np.ndarray:
    rows = [[int(tables.offsets[c]) + s for c, w in enumerate(p.words) for s in w] for p in paths]
    width = len(rows[0]) if rows else 0
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), width)


def rows_to_paths(tables: KernelTables, rows: np.ndarray) -> list:
    from .kgraph import _split_sorted

    out = []
    for row in rows.tolist():
        letters = []
        for gid in row:
            c = tables.color_of(gid)
            letters.append((c, gid - int(tables.offsets[c])))
        out.append(_split_sorted(tables.k, letters))
    return out
