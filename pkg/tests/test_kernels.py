import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given

from conftest import posets
from fibcalc import _kernels as K
from fibcalc.fincat import product, thin_functor, walking

needs_numba = pytest.mark.skipif(K.nb is None, reason="numba not installed")


def _args(c):
    return K._i(c.comp), K._i(c.src), K._i(c.tgt), K._i(c.ident)


@needs_numba
@given(posets(4))
def test_unit_and_inverse_kernels_agree(c):
    comp, src, tgt, ident = _args(c)
    assert K.nb_unit_violation(comp, src, tgt, ident) == K.np_unit_violation(comp, src, tgt, ident)
    assert np.array_equal(K.nb_inverses(comp, src, tgt, ident), K.np_inverses(comp, src, tgt, ident))
    nb = K.nb_assoc_violation(comp, src, tgt)
    assert nb[0] == -1 and K.np_assoc_violation(comp, src, tgt) is None


@needs_numba
def test_assoc_kernels_find_same_violation():
    comp, src, tgt, _ = _args(walking(2))
    comp = comp.copy()
    comp[comp == 5] = 4  # corrupt a composite
    h, g, f = K.nb_assoc_violation(comp, src, tgt)
    assert (int(h), int(g), int(f)) == K.np_assoc_violation(comp, src, tgt)


@needs_numba
@given(posets(4))
def test_cartesian_kernels_agree(c):
    b = walking(1)
    img = [0 if i < c.n_obj // 2 else 1 for i in range(c.n_obj)]
    try:
        p = thin_functor(c, b, img)
    except Exception:
        p = thin_functor(c, b, [0] * c.n_obj)
    args = tuple(K._i(a) for a in (c.src, c.tgt, c.comp, b.src, b.tgt, b.comp, p.obj, p.mor))
    assert np.array_equal(K.nb_cartesian_flags(*args), K.np_cartesian_flags(*args))


def test_projection_all_cartesian():
    c = walking(1)
    pp = product(c, c)
    p = thin_functor(pp, c, [a for a in range(2) for _ in range(2)])
    args = tuple(K._i(a) for a in (pp.src, pp.tgt, pp.comp, c.src, c.tgt, c.comp, p.obj, p.mor))
    flags = K.cartesian_flags(*args)
    assert flags.shape == (pp.n_mor,)
    assert flags.sum() > 0


def test_numpy_fallback_in_subprocess():
    env = dict(os.environ, FIBCALC_NO_NUMBA="1")
    code = "import fibcalc._kernels as K; print(K.USE_NUMBA)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "False"
