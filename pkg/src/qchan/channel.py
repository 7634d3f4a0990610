"""Completely positive maps as Kraus lists with cached Choi data.

A Channel stores its Kraus operators together with the unnormalized Choi
matrix (block (i,j) holds the image of |i><j|, trace n for a
trace-preserving map) and the normalized Jamiolkowski state jam = choi/n.
The unnormalized matrix carries the block structure and the dual-action
formula; every eigenvalue, fidelity or separability statement reads off
jam. Hermitian-preserving maps that are not CP get a signed Kraus form
instead, with real weights of either sign.
"""

import numpy as np

from . import numkit

DEFAULT_ATOL = 1e-10


def choi_matrix(kraus):
    """Unnormalized Choi matrix sum_k vec(A_k^T) vec(A_k^T)^dag."""
    n = kraus[0].shape[0]
    c = np.zeros((n * n, n * n), dtype=complex)
    for a in kraus:
        v = numkit.mat_to_vec(a.T)
        c += np.outer(v, v.conj())
    return c


class ChoiPair:
    """Unnormalized Choi matrix and its trace-1 Jamiolkowski state."""

    def __init__(self, choi):
        choi = numkit.require_hermitian(choi)
        d = choi.shape[0]
        n = int(round(np.sqrt(d)))
        if n * n != d:
            raise ValueError("Choi matrix size %d is not a perfect square" % d)
        self.dim = n
        self.choi = choi
        tr = np.trace(choi).real
        if tr <= 0:
            raise ValueError("Choi matrix has nonpositive trace")
        self.jam = choi / tr

    def block(self, i, j):
        """The image of |i><j| under the map, read out of the Choi blocks."""
        n = self.dim
        return self.choi[i * n:(i + 1) * n, j * n:(j + 1) * n]


class Channel:
    """A CP map held as Kraus operators; Choi data cached eagerly.

    Values are immutable after construction. The Choi matrix of any Kraus
    list is automatically PSD, so only shape and (optionally) the
    trace-preserving condition need checking here.
    """

    def __init__(self, kraus, require_tp=False, atol=DEFAULT_ATOL):
        ops = [np.asarray(a, dtype=complex) for a in kraus]
        if not ops:
            raise ValueError("need at least one Kraus operator")
        n = ops[0].shape[0]
        for a in ops:
            if a.shape != (n, n):
                raise ValueError("Kraus operators must be square and share "
                                 "one dimension, got shape %s" % (a.shape,))
        self.dim = n
        self.kraus = ops
        self.choi_pair = ChoiPair(choi_matrix(ops))
        ksum = sum(a.conj().T @ a for a in ops)
        self.trace_preserving = bool(
            np.abs(ksum - np.eye(n)).max() <= atol)
        if require_tp and not self.trace_preserving:
            raise ValueError("Kraus operators do not preserve the trace "
                             "(deviation %.3e)"
                             % np.abs(ksum - np.eye(n)).max())

    @property
    def choi(self):
        return self.choi_pair.choi

    @property
    def jam(self):
        return self.choi_pair.jam

    def __call__(self, rho):
        return apply(self, rho)


def from_kraus(kraus, require_tp=False):
    """Build a Channel from a Kraus operator list."""
    return Channel(kraus, require_tp=require_tp)


def choi(ch):
    """The ChoiPair of a channel."""
    return ch.choi_pair


def kraus_from_choi(c, tol=None):
    """Minimal Kraus list from a Choi matrix (or ChoiPair).

    Operators are rescaled eigenvectors, hence pairwise orthogonal in the
    Hilbert-Schmidt inner product, and their count equals the numerical
    rank. A negative eigenvalue below tolerance means the matrix is not a
    valid CP dual state and raises.
    """
    mat = c.choi if isinstance(c, ChoiPair) else np.asarray(c, dtype=complex)
    n = int(round(np.sqrt(mat.shape[0])))
    w, v = numkit.eigh(mat)
    top = max(w.max(), 0.0)
    if tol is None:
        tol = 1e-9 * max(top, 1.0)
    if w.min() < -max(tol, DEFAULT_ATOL * max(top, 1.0)):
        raise ValueError("not CP: Choi matrix has eigenvalue %.6e" % w.min())
    out = []
    for k in range(w.size):
        if w[k] > tol:
            out.append(np.sqrt(w[k]) * v[:, k].reshape(n, n).T)
    return out


def apply(ch, rho):
    """Act on a density matrix through the Kraus operators."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim, ch.dim):
        raise ValueError("state dimension %s does not match channel dim %d"
                         % (rho.shape, ch.dim))
    out = np.zeros_like(rho)
    for a in ch.kraus:
        out += a @ rho @ a.conj().T
    return out


def apply_via_dual(c, rho):
    """Act through the Choi matrix: Tr_1(choi^{T_1} (rho tensor I)).

    The partial transpose and the trace are both over the first
    (input-index) factor.
    """
    cp = c if isinstance(c, ChoiPair) else ChoiPair(np.asarray(c))
    n = cp.dim
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (n, n):
        raise ValueError("state dimension %s does not match Choi dim %d"
                         % (rho.shape, n))
    pt = numkit.partial_transpose(cp.choi, n, n, 1)
    return numkit.partial_trace(pt @ numkit.kron(rho, np.eye(n)), n, n, 1)


def _dual_route_bool(kraus_ok, choi_ok, what):
    if kraus_ok != choi_ok:
        raise RuntimeError("internal inconsistency: Kraus-sum and "
                           "Choi-marginal %s tests disagree" % what)
    return kraus_ok


def is_tp(ch, atol=DEFAULT_ATOL):
    """Trace preservation, checked on the Kraus sum and the Choi marginal.

    Both sum_i A_i^dag A_i = I and Tr_out(choi) = I are evaluated and must
    agree; disagreement would mean the cached Choi went stale.
    """
    n = ch.dim
    eye = np.eye(n)
    ksum = sum(a.conj().T @ a for a in ch.kraus)
    marg = numkit.partial_trace(ch.choi, n, n, 2)
    return _dual_route_bool(bool(np.abs(ksum - eye).max() <= atol),
                            bool(np.abs(marg - eye).max() <= atol), "TP")


def is_unital(ch, atol=DEFAULT_ATOL):
    """Unitality (identity fixed), Kraus sum and Choi marginal both checked."""
    n = ch.dim
    eye = np.eye(n)
    ksum = sum(a @ a.conj().T for a in ch.kraus)
    marg = numkit.partial_trace(ch.choi, n, n, 1)
    return _dual_route_bool(bool(np.abs(ksum - eye).max() <= atol),
                            bool(np.abs(marg - eye).max() <= atol), "unital")


def rank(ch, tol=1e-9):
    """Rank of the map: the rank of its Choi matrix."""
    w = numkit.eigh(ch.choi)[0]
    return int(np.count_nonzero(w > tol * max(w.max(), 1.0)))


class HermitianMap:
    """Signed Kraus form of a Hermitian-preserving map.

    Holds pairs (lam_i, A_i) with lam_i real and nonzero, acting as
    X -> sum_i lam_i A_i X A_i^dag. The (possibly non-PSD) Choi matrix is
    kept for deficit computations.
    """

    def __init__(self, dim, signed_kraus, choi):
        self.dim = dim
        self.signed_kraus = signed_kraus
        self.choi = choi

    def apply(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for lam, a in self.signed_kraus:
            out += lam * (a @ x @ a.conj().T)
        return out


def signed_kraus(action, tol=1e-9):
    """Signed Kraus form from the action on the matrix unit basis.

    action lists the images of |i><j| in row-major (i, j) order. The
    images must be Hermiticity-consistent: the image of |j><i| equals the
    adjoint of the image of |i><j|. Eigenvalues of the assembled Choi
    matrix give the signs, reshaped eigenvectors the operators.
    """
    mats = [np.asarray(a, dtype=complex) for a in action]
    n2 = len(mats)
    n = int(round(np.sqrt(n2)))
    if n * n != n2:
        raise ValueError("need n^2 basis images, got %d" % n2)
    scale = max(max(np.abs(a).max() for a in mats), 1.0)
    c = np.zeros((n2, n2), dtype=complex)
    for i in range(n):
        for j in range(n):
            if np.abs(mats[i * n + j] - mats[j * n + i].conj().T).max() \
                    > 1e-12 * scale:
                raise ValueError("action is not Hermiticity-consistent at "
                                 "basis element (%d, %d)" % (i, j))
            c[i * n:(i + 1) * n, j * n:(j + 1) * n] = mats[i * n + j]
    w, v = numkit.eigh(c)
    pairs = []
    for k in range(w.size):
        if abs(w[k]) > tol * max(np.abs(w).max(), 1.0):
            pairs.append((float(w[k]), v[:, k].reshape(n, n).T))
    return HermitianMap(n, pairs, c)


class CpDeficit:
    """How far a Hermitian-preserving map sits from being CP.

    epsilon is the minimal admixture of the completely depolarizing map
    that makes the Choi matrix PSD; tilde is the resulting CP channel.
    The source action is recovered as
    (1 + n*epsilon) * tilde(rho) - epsilon * Tr(rho) * I.
    """

    def __init__(self, epsilon, tilde):
        self.epsilon = epsilon
        self.tilde = tilde

    def reconstruct(self, rho):
        n = self.tilde.dim
        return ((1 + n * self.epsilon) * apply(self.tilde, rho)
                - self.epsilon * np.trace(rho) * np.eye(n))


def cp_deficit(hm):
    """CP-deficit decomposition of a HermitianMap.

    epsilon = max(0, -smallest Choi eigenvalue); the tilde channel has
    Choi (choi + eps*I) / (1 + n*eps). A CP input comes back unchanged
    with epsilon 0.
    """
    n = hm.dim
    w = numkit.eigh(hm.choi)[0]
    eps = max(0.0, -float(w.min()))
    tilde_choi = (hm.choi + eps * np.eye(n * n)) / (1 + n * eps)
    tilde = Channel(kraus_from_choi(tilde_choi))
    return CpDeficit(eps, tilde)


def compose(a, b):
    """Channel applying b first, then a (composition a after b)."""
    if a.dim != b.dim:
        raise ValueError("cannot compose channels of dims %d and %d"
                         % (a.dim, b.dim))
    return Channel([x @ y for x in a.kraus for y in b.kraus])


# builders ------------------------------------------------------------------

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def identity(n=2):
    return Channel([np.eye(n, dtype=complex)])


def unitary(u):
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if np.abs(u @ u.conj().T - np.eye(n)).max() > 1e-10:
        raise ValueError("matrix is not unitary")
    return Channel([u])


def depolarizing(p):
    """Mix toward the maximally mixed state: (1-p) rho + p Tr(rho) I/2."""
    if not 0 <= p <= 4 / 3:
        raise ValueError("depolarizing strength out of range")
    w0 = 1 - 3 * p / 4
    return Channel([np.sqrt(w0) * np.eye(2, dtype=complex),
                    np.sqrt(p) / 2 * _SX,
                    np.sqrt(p) / 2 * _SY,
                    np.sqrt(p) / 2 * _SZ])


def amplitude_damping(gamma):
    if not 0 <= gamma <= 1:
        raise ValueError("gamma out of range")
    return Channel([np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex),
                    np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)])


def phase_flip(p):
    if not 0 <= p <= 1:
        raise ValueError("p out of range")
    return Channel([np.sqrt(1 - p) * np.eye(2, dtype=complex),
                    np.sqrt(p) * _SZ])


def bit_flip(p):
    if not 0 <= p <= 1:
        raise ValueError("p out of range")
    return Channel([np.sqrt(1 - p) * np.eye(2, dtype=complex),
                    np.sqrt(p) * _SX])


def completely_depolarizing(n=2):
    """Send everything to the maximally mixed state."""
    ops = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1 / np.sqrt(n)
            ops.append(e)
    return Channel(ops)


def replacer(rho2):
    """Send every input to the fixed state rho2 (times the input trace)."""
    rho2 = numkit.require_hermitian(rho2)
    n = rho2.shape[0]
    w, v = numkit.eigh(rho2)
    if w.min() < -1e-10 or abs(w.sum() - 1) > 1e-10:
        raise ValueError("replacer target must be a density matrix")
    ops = []
    for k in range(n):
        if w[k] > 1e-12:
            for i in range(n):
                op = np.sqrt(w[k]) * np.outer(v[:, k],
                                              np.eye(n)[i].astype(complex))
                ops.append(op)
    return Channel(ops)


def transpose_map(n=2):
    """The transpose action as a HermitianMap (not CP, so not a Channel)."""
    action = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[j, i] = 1
            action.append(e)
    return signed_kraus(action)
