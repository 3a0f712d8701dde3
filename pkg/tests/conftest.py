import numpy as np
import pytest


def haar_orthogonal(rng, p):
    Q, R = np.linalg.qr(rng.standard_normal((p, p)))
    return Q * np.sign(np.diag(R))


def spd_root(Sigma):
    vals, vecs = np.linalg.eigh((Sigma + Sigma.T) / 2.0)
    return (vecs * np.sqrt(vals)) @ vecs.T


@pytest.fixture(scope="session")
def identity_fit():
    """One shared identity-covariance fit at p=200, n=1000."""
    from hdshrink.linalg import eigh, sample_covariance
    from hdshrink.mpkernel import lw_curve

    rng = np.random.default_rng(7)
    p, n = 200, 1000
    X = rng.standard_normal((p, n))
    spec = eigh(sample_covariance(X), n)
    curve = lw_curve(spec.eigenvalues, p, n)
    return X, spec, curve
