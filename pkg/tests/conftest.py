"""Shared fixtures and generators for the test suite."""

import numpy as np
import pytest

from sisobs import (FunctionClassSpec, NonlinearSystem, fixed_gains,
                    transform_system)


def random_system(rng, n=None, l=None, p=None, p_H=None, require_rank=True,
                  max_tries=200):
    """A random NonlinearSystem with linear dynamics and prescribed p_H.

    The feedthrough is built from its SVD factors so that its rank is exact,
    not approximate.  When require_rank is set the draw is retried until
    rk(C2 G2) = p - p_H holds, so the fixed-gain construction is applicable.
    """
    for _ in range(max_tries):
        n_ = int(rng.integers(2, 6)) if n is None else n
        l_ = int(rng.integers(1, n_ + 1)) if l is None else l
        p_ = int(rng.integers(0, l_ + 1)) if p is None else p
        pH_ = int(rng.integers(0, p_ + 1)) if p_H is None else p_H
        if not (n_ >= l_ >= p_ >= pH_ >= 0 and l_ >= 1):
            continue
        A = 0.5 * rng.standard_normal((n_, n_))
        C = rng.standard_normal((l_, n_))
        G = rng.standard_normal((n_, p_))
        if pH_:
            U = np.linalg.qr(rng.standard_normal((l_, l_)))[0]
            V = np.linalg.qr(rng.standard_normal((p_, p_)))[0]
            S = np.zeros((l_, p_))
            S[:pH_, :pH_] = np.diag(rng.uniform(0.5, 2.0, pH_))
            H = U @ S @ V.T
        else:
            H = np.zeros((l_, p_))
        try:
            sysm = NonlinearSystem(
                f=lambda k, x, _A=A: _A @ x, B=np.zeros((n_, 1)), G=G, C=C,
                D=np.zeros((l_, 1)), H=H, W=np.eye(n_), eta_w=0.1, eta_v=0.1,
                x0_hat=np.zeros(n_), delta0_x=1.0,
                class_spec=FunctionClassSpec.qcstar(A, 0.0))
        except Exception:
            continue
        T = transform_system(sysm)
        if T.p_H != pH_:
            continue
        if require_rank and not T.rank_condition_ok:
            continue
        return sysm, T
    raise RuntimeError("could not draw a random system with the requested shape")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def gains_of(sysm, T):
    return fixed_gains(T, sysm.W)
