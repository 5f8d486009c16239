import logging

import numpy as np
from scipy import optimize
from scipy import special

from rfdm import defaults
from rfdm import errors
from rfdm.tools import rng as rfdm_rng

LOG = logging.getLogger(__name__)


class DiseaseModel(object):
    def __init__(self, disease_roi, spurious_roi=(), mu_cn=defaults.MU_CN, mu_ad=defaults.MU_AD,
                 sigma=defaults.SIGMA, penetrance=defaults.PENETRANCE, n_roi=defaults.N_ROI):
        if sigma <= 0:
            raise errors.DataError('sigma must be positive, got %r' % sigma)
        if not 0.0 < penetrance < 1.0:
            raise errors.DataError('penetrance must lie in (0, 1), got %r' % penetrance)
        disease_roi = np.asarray(disease_roi, dtype=np.int64)
        spurious_roi = np.asarray(spurious_roi, dtype=np.int64)
        if len(np.intersect1d(disease_roi, spurious_roi)):
            raise errors.DataError('Disease and spurious ROI sets overlap')
        self.disease_roi = disease_roi
        self.spurious_roi = spurious_roi
        self.mu_cn = float(mu_cn)
        self.mu_ad = float(mu_ad)
        self.sigma = float(sigma)
        self.penetrance = float(penetrance)
        self.n_roi = int(n_roi)

    def to_dict(self):
        return {
            'disease_roi': self.disease_roi.tolist(),
            'spurious_roi': self.spurious_roi.tolist(),
            'mu_cn': self.mu_cn,
            'mu_ad': self.mu_ad,
            'sigma': self.sigma,
            'penetrance': self.penetrance,
            'n_roi': self.n_roi,
        }


def draw_disease_model(n_roi=defaults.N_ROI, n_disease_roi=defaults.N_DISEASE_ROI,
                       n_spurious_roi=defaults.N_SPURIOUS_ROI, seed=defaults.SEED, **kwargs):
    if n_disease_roi + n_spurious_roi > n_roi:
        raise errors.DataError('%d + %d ROIs requested out of %d' % (n_disease_roi, n_spurious_roi, n_roi))
    rng = rfdm_rng.generator(seed, rfdm_rng.ROI)
    perm = rng.permutation(n_roi)
    return DiseaseModel(
        np.sort(perm[:n_disease_roi]),
        np.sort(perm[n_disease_roi:n_disease_roi + n_spurious_roi]),
        n_roi=n_roi, **kwargs
    )


def posterior(ybar, model, penetrance=None):
    """P(disease | mean disease-ROI value) under equal-variance Gaussian classes."""
    prior = model.penetrance if penetrance is None else penetrance
    ybar = np.asarray(ybar, dtype=float)
    log_ratio = ((ybar - model.mu_cn) ** 2 - (ybar - model.mu_ad) ** 2) / (2.0 * model.sigma ** 2)
    return special.expit(np.log(prior / (1.0 - prior)) + log_ratio)


def disease_mean(y_star, model):
    return np.asarray(y_star, dtype=float)[:, model.disease_roi].mean(axis=1)


def classify_disease(y_star, model, seed=defaults.SEED):
    p = posterior(disease_mean(y_star, model), model)
    rng = rfdm_rng.generator(seed, rfdm_rng.DISEASE)
    labels = (rng.random(len(p)) < p).astype(np.int64)
    LOG.info('Classified %d subjects: %d cases (mean posterior %.3f)', len(p), labels.sum(), p.mean())
    return labels, p


def penetrance_at(ybar, model, zeta):
    return float(np.mean(posterior(np.asarray(ybar) - zeta, model)))


def calibrate_zeta(target_penetrance, model, y_star, tol=defaults.ZETA_TOLERANCE,
                   bracket=defaults.ZETA_BRACKET):
    """Shift of the disease ROIs at which the mean posterior equals the target.

    ``y_star`` holds the population's vectors with genetic effects applied
    and no shift. The target is also the prior of the posterior.
    """
    if not 0.0 < target_penetrance < 1.0:
        raise errors.DataError('Target penetrance must lie in (0, 1)')
    model = DiseaseModel(
        model.disease_roi, model.spurious_roi, mu_cn=model.mu_cn, mu_ad=model.mu_ad,
        sigma=model.sigma, penetrance=target_penetrance, n_roi=model.n_roi,
    )
    ybar = disease_mean(y_star, model)
    low, high = bracket

    def excess(zeta):
        return penetrance_at(ybar, model, zeta) - target_penetrance

    at_low, at_high = excess(low), excess(high)
    if abs(at_low) <= tol and at_low <= 0:
        return low
    if at_low < 0:
        raise errors.UnreachableTarget(
            'Penetrance %.3f at zeta=%g is already below the target %.3f' % (
                at_low + target_penetrance, low, target_penetrance)
        )
    if at_high > 0:
        if at_high <= tol:
            return high
        raise errors.UnreachableTarget(
            'Penetrance %.3f at zeta=%g is still above the target %.3f' % (
                at_high + target_penetrance, high, target_penetrance)
        )
    zeta = optimize.brentq(excess, low, high, xtol=1e-10)
    LOG.info('Calibrated zeta=%.4f for penetrance %.3f', zeta, target_penetrance)
    return float(zeta)


def penetrance_curve(ybar_grid, penetrances=defaults.PENETRANCE_LEVELS, model=None):
    """Posterior disease probability over a grid of mean values, one row per penetrance level."""
    if model is None:
        model = DiseaseModel([0])
    return np.stack([posterior(ybar_grid, model, penetrance=p) for p in penetrances])
