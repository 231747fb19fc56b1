import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankbs import _kernels as K
from rankbs.kgraph import enumerate_paths
from rankbs.selfsim import act_restrict, make_gbs, make_odometer, make_product_of_odometers

INSTANCES = [
    make_odometer(2, 3),
    make_odometer(3, -5),
    make_gbs([(2, [1, 3]), (3, [0, -2, 6])]),
    make_product_of_odometers((2, 3)),
    make_product_of_odometers((2, 4, 3)),
]


@pytest.mark.skipif(K._act_numba is None, reason="numba unavailable")
@given(st.sampled_from(INSTANCES), st.integers(0, 3), st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=8))
def test_numba_and_numpy_agree_with_the_exact_action(ss, d, gs):
    deg = (d,) * ss.k
    paths = list(enumerate_paths(ss.graph, deg))[:16]
    tab = K.KernelTables(ss)
    rows = K.paths_to_rows(tab, paths)
    for g in gs:
        assert K.fits_int64(tab, abs(g), rows.shape[1])
        a, ha = K.act_rows(tab, g, rows, use_numba=True)
        b, hb = K.act_rows(tab, g, rows, use_numba=False)
        assert np.array_equal(a, b) and np.array_equal(ha, hb)
        for p, img, h in zip(paths, K.rows_to_paths(tab, a), ha.tolist()):
            assert act_restrict(ss, g, p) == (img, h)


def test_per_row_group_elements():
    ss = make_odometer(2, 3)
    tab = K.KernelTables(ss)
    rows = K.rank1_rows(2, 3)
    gs = np.arange(-4, 4, dtype=np.int64)
    out, h = K.act_rows(tab, gs, rows)
    paths = K.rows_to_paths(tab, rows)
    for i, g in enumerate(gs.tolist()):
        assert act_restrict(ss, g, paths[i]) == (K.rows_to_paths(tab, out[i:i + 1])[0], int(h[i]))


def test_rows_round_trip_and_shapes():
    ss = make_product_of_odometers((2, 3))
    tab = K.KernelTables(ss)
    paths = list(enumerate_paths(ss.graph, (1, 2)))
    assert K.rows_to_paths(tab, K.paths_to_rows(tab, paths)) == paths
    assert K.rank1_rows(3, 2).shape == (9, 2)
    assert K.rank1_rows(3, 0).shape == (1, 0)
    empty, h = K.act_rows(tab, 5, np.zeros((3, 0), dtype=np.int64))
    assert empty.shape == (3, 0) and h.tolist() == [5, 5, 5]
    with pytest.raises(ValueError):
        K.act_rows(tab, 1, np.zeros(3, dtype=np.int64))


def test_fits_int64_guard():
    tab = K.KernelTables(make_odometer(2, 3))
    assert K.fits_int64(tab, 10**6, 10)
    # each letter can multiply the restriction by 3/2, so long words overflow
    assert not K.fits_int64(tab, 10**6, 200)
    assert not K.fits_int64(tab, 2**63, 1)


def test_environment_switch_selects_numpy():
    code = "from rankbs import _kernels as K; print(K.USE_NUMBA)"
    env = dict(os.environ, RANKBS_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=120)
    assert out.stdout.strip() == "False"
    env.pop("RANKBS_NO_NUMBA")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=120)
    assert out.stdout.strip() == str(K._act_numba is not None)
