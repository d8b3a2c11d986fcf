import os
import subprocess
import sys

import numpy as np
import pytest

from modsel import kernels
from modsel.lasso import LassoProblem

pytestmark = pytest.mark.skipif(kernels._cd_lasso_numba is None, reason="numba not installed")


class TestNumbaNumpyAgreement:
    def test_cd_lasso(self):
        rng = np.random.default_rng(0)
        for n, p, r in [(50, 10, 5.0), (100, 200, 80.0), (30, 5, 0.0)]:
            prob = LassoProblem.standardized(rng.standard_normal((n, p)), rng.standard_normal(n), r)
            col_sq = np.einsum("ij,ij->j", prob.X, prob.X)
            out = []
            for fn in (kernels._cd_lasso_numba, kernels._cd_lasso_numpy):
                beta = np.zeros(prob.p)
                hist = np.empty(2001)
                sweeps, ok = fn(np.ascontiguousarray(prob.X), prob.y, beta, r, 1e-10, 2000, col_sq, hist)
                out.append((beta, sweeps, ok, hist[: sweeps + 1]))
            np.testing.assert_allclose(out[0][0], out[1][0], atol=1e-10)
            assert out[0][1] == out[1][1] and out[0][2] == out[1][2]
            np.testing.assert_allclose(out[0][3], out[1][3], rtol=1e-10)

    def test_mixture_grid(self):
        rng = np.random.default_rng(1)
        lr1 = np.expm1(rng.standard_normal(500))
        grid = np.linspace(0, 1, 301)
        a = kernels._mixture_loglik_numba(lr1, grid, np.empty(301))
        b = kernels._mixture_loglik_numpy(lr1, grid, np.empty(301))
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-10)

    def test_step_up(self):
        rng = np.random.default_rng(2)
        for m in (1, 5, 100, 1000):
            p = np.sort(rng.uniform(size=m) ** 3)
            for alpha in (0.01, 0.1, 0.5):
                assert kernels._step_up_numba(p, alpha) == kernels._step_up_numpy(p, alpha)


def test_env_flag_selects_numpy():
    code = "import modsel.kernels as k; print(k.USE_NUMBA)"
    env = dict(os.environ, MODSEL_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_numpy_path_end_to_end():
    code = ("import numpy as np; from modsel.lasso import *; "
            "rng=np.random.default_rng(0); Z=rng.standard_normal((40,6)); "
            "f=fit_lasso(LassoProblem.standardized(Z, Z[:,0]+rng.standard_normal(40), 10.0)); "
            "print(repr(f.beta.tolist()))")
    res = {}
    for flag in ("0", "1"):
        env = dict(os.environ, MODSEL_NUMBA=flag)
        res[flag] = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout
    np.testing.assert_allclose(eval(res["0"]), eval(res["1"]), atol=1e-12)
