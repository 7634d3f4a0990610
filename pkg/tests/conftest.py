"""Shared random-object helpers for the test suite."""

import numpy as np

from qchan import channel


def random_unitary(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(rng, n, rank=None):
    r = rank if rank is not None else n
    g = rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_tp_channel(rng, n, m):
    """Random trace-preserving channel with m Kraus operators.

    Blocks of a Haar-random (n*m, n) isometry; the column orthonormality
    of the isometry is exactly the trace-preserving condition.
    """
    g = rng.normal(size=(n * m, n)) + 1j * rng.normal(size=(n * m, n))
    q = np.linalg.qr(g)[0]
    return channel.Channel([q[k * n:(k + 1) * n, :] for k in range(m)],
                           require_tp=True)
