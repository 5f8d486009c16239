import logging
import warnings

import numpy as np
from scipy import linalg
from sklearn import exceptions
from sklearn import linear_model

from rfdm import defaults
from rfdm import errors
from rfdm.tools import dataset

LOG = logging.getLogger(__name__)

LASSO_TOL = 1e-10
LASSO_MAX_ITER = 100000


def dual_gap(s, theta, rho):
    """tr(S Theta) - p + rho * |Theta|_1, with the diagonal penalized."""
    return np.sum(s * theta) - s.shape[0] + rho * np.abs(theta).sum()


def _column_lasso(lasso, w11, s12, coef):
    """min_b 1/2 b' W11 b - s12' b + rho |b|_1, posed as a least squares lasso."""
    k = len(s12)
    upper = linalg.cholesky(w11, lower=False)
    x = np.asfortranarray(np.sqrt(k) * upper)
    y = np.sqrt(k) * linalg.solve_triangular(upper, s12, trans='T', lower=False)
    lasso.coef_ = coef.copy()
    lasso.fit(x, y, check_input=False)
    return lasso.coef_.copy()


def graphical_lasso(s, rho=defaults.SICE_RHO, tol=defaults.SICE_TOL, max_iter=defaults.SICE_MAX_ITER):
    """Sparse inverse covariance by block coordinate descent.

    Maximizes log det Theta - tr(S Theta) - rho |Theta|_1 (all entries
    penalized, so the working covariance has diagonal S_kk + rho).
    Returns (theta, covariance, gap, n_iter).
    """
    s = dataset.check_spd_matrices([s])[0]
    if rho < 0:
        raise errors.DataError('rho must be nonnegative, got %r' % rho)
    p = s.shape[0]
    if rho == 0:
        theta = linalg.inv(s)
        theta = 0.5 * (theta + theta.T)
        return theta, np.array(s), dual_gap(s, theta, 0.0), 0

    w = np.array(s) + rho * np.eye(p)
    coefs = np.zeros((p, p))
    theta = np.zeros((p, p))
    lasso = linear_model.Lasso(
        alpha=rho, fit_intercept=False, tol=LASSO_TOL, max_iter=LASSO_MAX_ITER,
        warm_start=True, selection='cyclic',
    )
    indices = np.arange(p)
    gap = np.inf
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', category=exceptions.ConvergenceWarning)
        for it in range(max_iter):
            w_old = w.copy()
            for j in range(p):
                others = indices != j
                w11 = w[np.ix_(others, others)]
                b = _column_lasso(lasso, w11, s[others, j], coefs[j, others])
                coefs[j, others] = b
                w12 = w11.dot(b)
                w[others, j] = w12
                w[j, others] = w12
                theta[j, j] = 1.0 / (w[j, j] - w12.dot(b))
                theta[others, j] = -theta[j, j] * b
                theta[j, others] = -theta[j, j] * b
            if not np.all(np.isfinite(theta)):
                raise errors.ConvergenceError('Graphical lasso diverged: the system is too ill-conditioned')
            gap = dual_gap(s, theta, rho)
            change = np.max(np.abs(w - w_old))
            LOG.debug('graphical lasso iteration %d: dual gap %.3e, max change %.3e', it, gap, change)
            if abs(gap) <= tol and change <= tol:
                break
        else:
            raise errors.ConvergenceError(
                'Graphical lasso did not converge after %d iterations: dual gap %.3e' % (max_iter, gap),
                gap=gap,
            )
    theta = 0.5 * (theta + theta.T)
    return theta, w, gap, it + 1


def precision_graph(theta, threshold=defaults.SICE_EDGE_THRESHOLD):
    k, l = np.nonzero(np.triu(np.abs(theta) > threshold, k=1))
    return dataset.Graph(theta.shape[0], np.stack([k, l], axis=1))


def sice_graph(sigma, rho=defaults.SICE_RHO, tol=defaults.SICE_TOL, max_iter=defaults.SICE_MAX_ITER):
    theta, _, _, _ = graphical_lasso(sigma, rho=rho, tol=tol, max_iter=max_iter)
    return precision_graph(theta)
