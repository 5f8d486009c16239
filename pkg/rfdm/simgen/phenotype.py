import logging

import numpy as np
from scipy import linalg

from rfdm import defaults
from rfdm import errors
from rfdm.tools import rng as rfdm_rng

LOG = logging.getLogger(__name__)


def shrink_covariance(samples):
    """Shrinkage covariance towards the diagonal of the sample covariance.

    The intensity is the ratio of the summed estimated variances of the
    off-diagonal sample covariances to their summed squares, clipped to
    [0, 1]. Zero-variance columns get a unit target entry. When the sample
    covariance is singular (n <= q or a constant column) the intensity is
    floored at 1/n.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise errors.InsufficientSubjects('Shrinkage covariance needs at least 2 samples')
    n, q = x.shape
    xc = x - x.mean(axis=0)
    s = xc.T.dot(xc) / (n - 1)
    w_bar = xc.T.dot(xc) / n
    sq = xc ** 2
    var_s = n / float((n - 1) ** 3) * (sq.T.dot(sq) - n * w_bar ** 2)

    off = ~np.eye(q, dtype=bool)
    denom = np.sum(s[off] ** 2)
    lam = np.sum(var_s[off]) / denom if denom > 0 else 1.0
    lam = float(np.clip(lam, 0.0, 1.0))

    target = np.diag(s).copy()
    constant = target <= 0
    target[constant] = 1.0
    if n <= q or constant.any():
        lam = max(lam, 1.0 / n)

    shrunk = (1.0 - lam) * s
    np.fill_diagonal(shrunk, lam * target + (1.0 - lam) * np.diag(s))
    LOG.debug('Shrinkage intensity %.4f for %d samples of dimension %d', lam, n, q)
    return shrunk


class VectorModel(object):
    """Gaussian generator of base phenotype vectors."""

    def __init__(self, mean, cov):
        self.mean = np.asarray(mean, dtype=float)
        self.cov = np.asarray(cov, dtype=float)
        self._chol = None

    @property
    def n_roi(self):
        return len(self.mean)

    def sample(self, n, rng):
        if self._chol is None:
            self._chol = linalg.cholesky(self.cov, lower=True)
        z = rng.standard_normal((n, self.n_roi))
        return self.mean + z.dot(self._chol.T)


def reference_vector_model(n_roi=defaults.N_ROI, seed=defaults.SEED,
                           mean=defaults.BASE_MEAN, sd=defaults.BASE_SD,
                           correlation=defaults.BASE_CORRELATION,
                           n_reference=defaults.N_REFERENCE_SUBJECTS):
    """Reference healthy-population generator.

    A pilot sample is drawn from a Gaussian with exponentially decaying
    correlation between neighbouring parcels, its mean and shrinkage
    covariance are estimated, and the pooled moments are recalibrated to
    ``mean`` and ``sd``.
    """
    rng = rfdm_rng.generator(seed, rfdm_rng.REFERENCE)
    lag = np.abs(np.arange(n_roi)[:, None] - np.arange(n_roi)[None, :])
    true_cov = sd ** 2 * correlation ** lag
    chol = linalg.cholesky(true_cov, lower=True)
    pilot = mean + rng.standard_normal((n_reference, n_roi)).dot(chol.T)

    mu = pilot.mean(axis=0)
    cov = shrink_covariance(pilot)
    mu = mu - mu.mean() + mean
    spread = mu.var()
    cov = cov * ((sd ** 2 - spread) / np.mean(np.diag(cov)))
    return VectorModel(mu, cov)


def simulate_base_vectors(n_subjects, n_roi=defaults.N_ROI, disease_model=None, zeta=0.0,
                          seed=defaults.SEED, reference=None):
    if reference is None:
        reference = reference_vector_model(n_roi=n_roi, seed=seed)
    if reference.n_roi != n_roi:
        raise errors.DimensionMismatch('Reference has %d ROIs, expected %d' % (reference.n_roi, n_roi))
    rng = rfdm_rng.generator(seed, rfdm_rng.BASE_VECTORS)
    y = reference.sample(n_subjects, rng)
    if zeta:
        if disease_model is None:
            raise errors.DataError('A disease model is needed to apply zeta')
        y[:, disease_model.disease_roi] -= zeta
    return y


def project_spd(sigma, clip=defaults.COVARIANCE_CLIP):
    """Symmetrize and raise eigenvalues below ``clip``. Returns (matrix, n_clipped)."""
    sigma = 0.5 * (sigma + sigma.T)
    eig, vec = linalg.eigh(sigma)
    low = eig < clip
    if not low.any():
        return sigma, 0
    eig = np.maximum(eig, clip)
    sigma = (vec * eig).dot(vec.T)
    return 0.5 * (sigma + sigma.T), int(low.sum())


def simulate_base_covariances(n_subjects, reference, seed=defaults.SEED,
                              noise_scale=defaults.COVARIANCE_NOISE, subject_index=None):
    """Per-subject covariances: reference plus symmetrized unit Gaussian noise, projected to SPD.

    ``subject_index`` names the random substream of each subject so that a
    subject's matrix does not depend on which other subjects are drawn.
    """
    reference = np.asarray(reference, dtype=float)
    q = reference.shape[0]
    if subject_index is None:
        subject_index = range(n_subjects)
    subject_index = list(subject_index)
    if len(subject_index) != n_subjects:
        raise errors.DimensionMismatch('%d subject indices for %d subjects' % (len(subject_index), n_subjects))
    sigmas = []
    clipped = 0
    for i in subject_index:
        rng = rfdm_rng.generator(seed, rfdm_rng.COVARIANCE, i)
        sigma = reference + noise_scale * rng.standard_normal((q, q))
        sigma, c = project_spd(sigma)
        clipped += c
        sigmas.append(sigma)
    if clipped:
        LOG.warning('Clipped %d eigenvalues of %d perturbed covariances to %g',
                    clipped, n_subjects, defaults.COVARIANCE_CLIP)
    return sigmas
