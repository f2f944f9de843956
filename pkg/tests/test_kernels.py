import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from revclt import kernels
from revclt.chain_model import build_chain
from revclt.rng import RngStream

needs_cython = pytest.mark.skipif("cython" not in kernels.available_backends(), reason="compiled kernels not built")

SPECS = [build_chain("example1"), build_chain("stable", alpha=1.5), build_chain("stable", alpha=1.3), build_chain("constant", c=0.7)]


def _call(backend, name, spec, n, seed):
    kind, shape = spec.kernel
    gen = RngStream(seed, 0, name).generator()
    return getattr(kernels.get_backend(backend), name)(gen, kind, shape, n)


def _same(a, b):
    if isinstance(a, tuple):
        assert len(a) == len(b)
        for x, y in zip(a, b):
            _same(x, y)
    else:
        assert np.array_equal(np.asarray(a), np.asarray(b))


@needs_cython
@pytest.mark.parametrize("name", ["regen_sum", "regen_runs", "regen_blocks", "step_sum", "step_path"])
@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.variant}{s.params}")
@pytest.mark.parametrize("n", [1, 7, 5000])
def test_backends_bit_identical(name, spec, n):
    _same(_call("cython", name, spec, n, 3), _call("python", name, spec, n, 3))


@needs_cython
@settings(max_examples=30)
@given(st.lists(st.floats(-1e12, 1e12, allow_nan=False), max_size=200))
def test_neumaier_backends_agree(xs):
    a = kernels.get_backend("cython").neumaier_cumsum(np.array(xs, dtype=float))
    b = kernels.get_backend("python").neumaier_cumsum(np.array(xs, dtype=float))
    assert np.array_equal(a, b)


@settings(max_examples=50)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=300))
def test_neumaier_matches_fsum(xs):
    out = kernels.neumaier_cumsum(np.array(xs, dtype=float))
    assert out[0] == 0.0 and out.size == len(xs) + 1
    assert out[-1] == pytest.approx(math.fsum(xs), abs=1e-9)


def test_neumaier_compensates():
    x = np.array([1.0, 1e100, 1.0, -1e100])
    assert kernels.neumaier_cumsum(x)[-1] == 2.0


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_pure_python_env():
    env = dict(os.environ, REVCLT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from revclt import kernels; print(kernels.BACKEND)"], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "python"


@needs_cython
def test_default_backend_is_compiled():
    env = {k: v for k, v in os.environ.items() if k != "REVCLT_PURE_PYTHON"}
    out = subprocess.run([sys.executable, "-c", "from revclt import kernels; print(kernels.BACKEND)"], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "cython"
