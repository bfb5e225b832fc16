"""Integer kernels over composition tables.

A table ``comp`` is an (M, M) int array with ``comp[g, f] = g o f`` and -1
where the pair is not composable.  Each kernel has a numba version and a
numpy version; ``FIBCALC_NO_NUMBA=1`` selects numpy for the whole process.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover
    nb = None


def _numba_wanted() -> bool:
    flag = os.environ.get("FIBCALC_NO_NUMBA", "").strip().lower()
    return nb is not None and flag not in ("1", "true", "yes", "on")


USE_NUMBA = _numba_wanted()


# ---------------------------------------------------------------- numpy path

def np_assoc_violation(comp, src, tgt):
    m = comp.shape[0]
    for f in range(m):
        gs = np.nonzero(src == tgt[f])[0]
        if gs.size == 0:
            continue
        gf = comp[gs, f]
        for i, g in enumerate(gs):
            hs = np.nonzero(src == tgt[g])[0]
            if hs.size == 0:
                continue
            left = comp[comp[hs, g], f]
            right = comp[hs, gf[i]]
            bad = np.nonzero(left != right)[0]
            if bad.size:
                return int(hs[bad[0]]), int(g), int(f)
    return None


def np_unit_violation(comp, src, tgt, ident):
    m = comp.shape[0]
    idx = np.arange(m)
    left = comp[ident[tgt], idx]
    right = comp[idx, ident[src]]
    bad = np.nonzero((left != idx) | (right != idx))[0]
    return int(bad[0]) if bad.size else -1


def np_inverses(comp, src, tgt, ident):
    cand = (comp.T == ident[src][:, None]) & (comp == ident[tgt][:, None])
    inv = np.full(comp.shape[0], -1, dtype=np.int64)
    rows, cols = np.nonzero(cand)
    # first hit per row; inverses are unique anyway
    seen = np.zeros(comp.shape[0], dtype=bool)
    for r, c in zip(rows, cols):
        if not seen[r]:
            inv[r] = c
            seen[r] = True
    return inv


def np_cartesian_flags(src, tgt, comp, bsrc, btgt, bcomp, pobj, pmor):
    m = src.shape[0]
    mb = bsrc.shape[0]
    out = np.zeros(m, dtype=np.bool_)
    for a in range(m):
        y, z = src[a], tgt[a]
        pa, py = pmor[a], pobj[y]
        hs = np.nonzero(tgt == y)[0]
        keys = comp[a, hs].astype(np.int64) * mb + pmor[hs]
        if np.unique(keys).size != keys.size:
            continue
        ks = np.nonzero(tgt == z)[0]
        us = np.nonzero(btgt == py)[0]
        ok = (bsrc[us][None, :] == pobj[src[ks]][:, None]) & (
            bcomp[pa, us][None, :] == pmor[ks][:, None]
        )
        out[a] = int(ok.sum()) == hs.size
    return out


# ---------------------------------------------------------------- numba path

if nb is not None:

    @nb.njit(cache=True)
    def nb_assoc_violation(comp, src, tgt):
        m = comp.shape[0]
        for f in range(m):
            for g in range(m):
                if src[g] != tgt[f]:
                    continue
                gf = comp[g, f]
                for h in range(m):
                    if src[h] != tgt[g]:
                        continue
                    if comp[comp[h, g], f] != comp[h, gf]:
                        return h, g, f
        return -1, -1, -1

    @nb.njit(cache=True)
    def nb_unit_violation(comp, src, tgt, ident):
        for k in range(comp.shape[0]):
            if comp[ident[tgt[k]], k] != k or comp[k, ident[src[k]]] != k:
                return k
        return -1

    @nb.njit(cache=True)
    def nb_inverses(comp, src, tgt, ident):
        m = comp.shape[0]
        inv = np.full(m, -1, dtype=np.int64)
        for a in range(m):
            for b in range(m):
                if src[b] != tgt[a] or tgt[b] != src[a]:
                    continue
                if comp[b, a] == ident[src[a]] and comp[a, b] == ident[tgt[a]]:
                    inv[a] = b
                    break
        return inv

    @nb.njit(cache=True)
    def nb_cartesian_flags(src, tgt, comp, bsrc, btgt, bcomp, pobj, pmor):
        m = src.shape[0]
        mb = bsrc.shape[0]
        out = np.zeros(m, dtype=np.bool_)
        mark = np.full((m, mb), -1, dtype=np.int64)
        for a in range(m):
            y = src[a]
            z = tgt[a]
            pa = pmor[a]
            py = pobj[y]
            nh = 0
            dup = False
            for h in range(m):
                if tgt[h] != y:
                    continue
                c = comp[a, h]
                ph = pmor[h]
                if mark[c, ph] == a:
                    dup = True
                    break
                mark[c, ph] = a
                nh += 1
            if dup:
                continue
            npairs = 0
            for k in range(m):
                if tgt[k] != z:
                    continue
                px = pobj[src[k]]
                pk = pmor[k]
                for u in range(mb):
                    if btgt[u] == py and bsrc[u] == px and bcomp[pa, u] == pk:
                        npairs += 1
            out[a] = npairs == nh
        return out


# ---------------------------------------------------------------- dispatch

def _i(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def assoc_violation(comp, src, tgt):
    if USE_NUMBA:
        h, g, f = nb_assoc_violation(_i(comp), _i(src), _i(tgt))
        return None if h < 0 else (int(h), int(g), int(f))
    return np_assoc_violation(comp, src, tgt)


def unit_violation(comp, src, tgt, ident) -> int:
    if USE_NUMBA:
        return int(nb_unit_violation(_i(comp), _i(src), _i(tgt), _i(ident)))
    return np_unit_violation(comp, src, tgt, ident)


def inverses(comp, src, tgt, ident) -> np.ndarray:
    if USE_NUMBA:
        return nb_inverses(_i(comp), _i(src), _i(tgt), _i(ident))
    return np_inverses(comp, src, tgt, ident)


def cartesian_flags(src, tgt, comp, bsrc, btgt, bcomp, pobj, pmor) -> np.ndarray:
    """Flag each edge of the source whose hom-square against p is a bijection."""
    if src.shape[0] == 0:
        return np.zeros(0, dtype=np.bool_)
    args = tuple(_i(a) for a in (src, tgt, comp, bsrc, btgt, bcomp, pobj, pmor))
    if USE_NUMBA:
        return nb_cartesian_flags(*args)
    return np_cartesian_flags(*args)
