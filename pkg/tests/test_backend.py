import os
import subprocess
import sys

import numpy as np
import pytest

from hsball import _backend, _fallback
from hsball.polyfn import basis


def _vectors(rng, n, cap, deg):
    b = basis(n, cap)
    k = b.count_upto(deg)
    a = np.zeros(b.size, complex)
    c = np.zeros(b.size, complex)
    a[:k] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    c[:k] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return b, a, c


@pytest.mark.parametrize("n,cap,deg", [(1, 12, 8), (2, 10, 6), (3, 6, 4)])
def test_mul_backends_agree(rng, n, cap, deg):
    b, a, c = _vectors(rng, n, cap, deg)
    out1, tr1 = _backend.mul_truncated(a, c, b.keys, b.degs, b.lookup, cap)
    out2, tr2 = _fallback.mul_truncated(a, c, b.keys, b.degs, b.lookup, cap)
    assert tr1 == tr2 == (2 * deg > cap)
    assert np.allclose(out1, out2, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("n,cap", [(1, 12), (2, 8), (3, 5)])
def test_eval_backends_agree(rng, n, cap):
    b, a, _ = _vectors(rng, n, cap, cap)
    Z = 0.5 * (rng.standard_normal((300, n)) + 1j * rng.standard_normal((300, n))) / np.sqrt(n)
    Z = np.ascontiguousarray(Z)
    v1 = _backend.eval_many(a, b.exps, Z, cap)
    v2 = _fallback.eval_many(a, b.exps, Z, cap)
    assert np.allclose(v1, v2, rtol=1e-12, atol=1e-12)


def test_pure_python_switch():
    env = dict(os.environ, HSBALL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import hsball; print(hsball.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "python"
