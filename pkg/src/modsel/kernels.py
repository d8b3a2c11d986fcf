"""Hot inner loops.

Every kernel exists twice: an explicit-loop version compiled by numba and a
vectorized numpy version. The public names dispatch on ``USE_NUMBA``; both
variants are importable for testing and benchmarking.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = ["cd_lasso", "mixture_loglik_grid", "step_up_count", "USE_NUMBA"]


# -- coordinate descent for the Lasso ---------------------------------------

def _cd_lasso_loops(X, y, beta, penalty, tol, max_iter, col_sq, objective):
    n, p = X.shape
    resid = np.empty(n)
    for i in range(n):
        acc = y[i]
        for j in range(p):
            acc -= X[i, j] * beta[j]
        resid[i] = acc
    half = 0.5 * penalty

    def _obj():
        rss = 0.0
        for i in range(n):
            rss += resid[i] * resid[i]
        l1 = 0.0
        for j in range(1, p):
            l1 += abs(beta[j])
        return rss + penalty * l1

    objective[0] = _obj()
    for it in range(max_iter):
        max_delta = 0.0
        for j in range(p):
            if col_sq[j] == 0.0:
                continue
            rho = 0.0
            for i in range(n):
                rho += X[i, j] * resid[i]
            rho += col_sq[j] * beta[j]
            if j == 0:
                new = rho / col_sq[j]
            elif rho > half:
                new = (rho - half) / col_sq[j]
            elif rho < -half:
                new = (rho + half) / col_sq[j]
            else:
                new = 0.0
            delta = new - beta[j]
            if delta != 0.0:
                for i in range(n):
                    resid[i] -= delta * X[i, j]
                beta[j] = new
                step = abs(delta) * col_sq[j]
                if step > max_delta:
                    max_delta = step
        objective[it + 1] = _obj()
        if max_delta < tol:
            return it + 1, True
    return max_iter, False


def _cd_lasso_numpy(X, y, beta, penalty, tol, max_iter, col_sq, objective):
    X = np.asfortranarray(X)
    resid = y - X @ beta
    half = 0.5 * penalty
    objective[0] = resid @ resid + penalty * np.abs(beta[1:]).sum()
    for it in range(max_iter):
        max_delta = 0.0
        for j in range(X.shape[1]):
            if col_sq[j] == 0.0:
                continue
            xj = X[:, j]
            rho = xj @ resid + col_sq[j] * beta[j]
            if j == 0:
                new = rho / col_sq[j]
            else:
                new = np.sign(rho) * max(abs(rho) - half, 0.0) / col_sq[j]
            delta = new - beta[j]
            if delta != 0.0:
                resid -= delta * xj
                beta[j] = new
                max_delta = max(max_delta, abs(delta) * col_sq[j])
        objective[it + 1] = resid @ resid + penalty * np.abs(beta[1:]).sum()
        if max_delta < tol:
            return it + 1, True
    return max_iter, False


_cd_lasso_numba = njit(_cd_lasso_loops)


def cd_lasso(X, y, beta, penalty, tol, max_iter):
    """Cyclic coordinate descent on ``||y - X b||^2 + penalty * sum_{j>=1} |b_j|``.

    Column 0 is the unpenalized intercept. ``beta`` is updated in place.
    A sweep converges when every update moved its coordinate's partial
    gradient by less than ``tol``, i.e. ``|delta_j| * ||x_j||^2 < tol``.
    Returns ``(sweeps, converged, objective_history)``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    col_sq = np.einsum("ij,ij->j", X, X)
    objective = np.empty(max_iter + 1)
    if USE_NUMBA:
        sweeps, ok = _cd_lasso_numba(X, y, beta, float(penalty), float(tol),
                                     int(max_iter), col_sq, objective)
    else:
        sweeps, ok = _cd_lasso_numpy(X, y, beta, float(penalty), float(tol),
                                     int(max_iter), col_sq, objective)
    return sweeps, ok, objective[: sweeps + 1].copy()


# -- two-groups mixture log-likelihood on a grid of proportions -------------

def _mixture_loglik_loops(lr_minus_one, grid, out):
    for g in range(grid.shape[0]):
        e = grid[g]
        acc = 0.0
        for i in range(lr_minus_one.shape[0]):
            acc += np.log1p(e * lr_minus_one[i])
        out[g] = acc
    return out


def _mixture_loglik_numpy(lr_minus_one, grid, out, chunk=256):
    for start in range(0, grid.shape[0], chunk):
        block = grid[start:start + chunk]
        out[start:start + chunk] = np.log1p(np.outer(block, lr_minus_one)).sum(axis=1)
    return out


_mixture_loglik_numba = njit(_mixture_loglik_loops, fastmath=True)


def mixture_loglik_grid(lr_minus_one, grid):
    """``sum_i log(1 + e * (lr_i - 1))`` for each ``e`` in ``grid``.

    With ``lr_i = f_A(z_i) / f_0(z_i)`` this is the two-groups log-likelihood
    of the proportion ``e`` up to the ``e``-free term ``sum_i log f_0(z_i)``.

    Always runs the numpy variant: numpy's vectorized ``log1p`` beats the
    compiled scalar loop here (see ``benchmarks/bench_kernels.py``).
    """
    lr_minus_one = np.ascontiguousarray(lr_minus_one, dtype=np.float64)
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    out = np.empty(grid.shape[0])
    return _mixture_loglik_numpy(lr_minus_one, grid, out)


# -- Benjamini-Hochberg step-up ---------------------------------------------

def _step_up_loops(sorted_p, alpha):
    m = sorted_p.shape[0]
    k = 0
    for i in range(m):
        if sorted_p[i] <= alpha * (i + 1) / m:
            k = i + 1
    return k


def _step_up_numpy(sorted_p, alpha):
    m = sorted_p.shape[0]
    hits = np.nonzero(sorted_p <= alpha * np.arange(1, m + 1) / m)[0]
    return int(hits[-1]) + 1 if hits.size else 0


_step_up_numba = njit(_step_up_loops)


def step_up_count(sorted_p, alpha):
    """Largest ``i`` with ``p_(i) <= i * alpha / m`` (0 if none)."""
    sorted_p = np.ascontiguousarray(sorted_p, dtype=np.float64)
    if sorted_p.shape[0] == 0:
        return 0
    if USE_NUMBA:
        return int(_step_up_numba(sorted_p, float(alpha)))
    return _step_up_numpy(sorted_p, float(alpha))
