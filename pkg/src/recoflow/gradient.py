"""Gradient-flow form of the type-level network.

For a strongly reversible network the mass-action law can be written as
dc/dt = C(c) grad F(c) with F the negative free energy and

    C(c) = sum over forward/backward pairs of
           kappa * L(prod c(r), prod c(s)) * v v^T,   v = sum(s_i - r_i),

where L is the logarithmic mean.  Each pair contributes a rank-one positive
semi-definite term, so C(c) is symmetric PSD with the all-ones vector in its
kernel.
"""

from __future__ import annotations

import numpy as np

from .distributions import grad_free_energy, seeded_rng
from .errors import BoundaryError, DimensionError, DomainError, SymmetryError
from .networks import ReactionNetwork, pair_reactions

SERIES_CUTOFF = 1e-4
PSD_TOL = -1e-9
SYMMETRY_TOL = 1e-12


def log_mean(x, y):
    """Logarithmic mean (x - y) / (log x - log y), extended continuously.

    L(x, x) = x and L(x, 0) = L(0, y) = 0.  Evaluated through
    r = (x - y)/(x + y) as (x + y) r / (2 atanh r), with a two-term series for
    |r| < 1e-4 to avoid cancellation and the plain quotient for |r| > 1/2.
    Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0) or np.any(np.isnan(x)) or np.any(np.isnan(y)):
        raise DomainError("logarithmic mean needs nonnegative arguments")
    x, y = np.broadcast_arrays(x, y)
    out = np.zeros(x.shape)
    pos = (x > 0) & (y > 0)
    s = x[pos] + y[pos]
    r = (x[pos] - y[pos]) / s
    small = np.abs(r) < SERIES_CUTOFF
    far = np.abs(r) > 0.5
    mid = ~small & ~far
    val = np.empty_like(s)
    val[small] = 0.5 * s[small] * (1.0 - r[small] ** 2 / 3.0)
    val[mid] = s[mid] * r[mid] / (2.0 * np.arctanh(r[mid]))
    # well separated: the logs differ by more than log 3, no cancellation
    xf, yf = x[pos][far], y[pos][far]
    val[far] = (xf - yf) / (np.log(xf) - np.log(yf))
    out[pos] = val
    return out if out.ndim else float(out)


def _pair_data(net: ReactionNetwork):
    cached = getattr(net, "_pair_cache", None)
    if cached is not None:
        return cached
    if net.pairing is None:
        pair_reactions(net)
    rows, subs, prods, kappas = [], [], [], []
    for f, _ in net.pairing.pairs:
        r = net.reactions[f]
        if r.void:
            continue
        v = np.zeros(net.carrier_size)
        np.add.at(v, list(r.products), 1.0)
        np.add.at(v, list(r.substrates), -1.0)
        rows.append(v)
        subs.append(r.substrates)
        prods.append(r.products)
        kappas.append(r.kappa)
    if rows:
        # pad mixed arities with a sentinel slot that holds 1.0
        width = max(len(s) for s in subs)
        pad = net.carrier_size

        def padded(seqs):
            return np.array([list(s) + [pad] * (width - len(s)) for s in seqs], dtype=int)

        data = (np.array(rows), padded(subs), padded(prods), np.array(kappas))
    else:
        data = (np.zeros((0, net.carrier_size)), None, None, np.zeros(0))
    net._pair_cache = data
    return data


def onsager_matrix(net: ReactionNetwork, c, allow_boundary=False) -> np.ndarray:
    """C(c) summed over the non-void forward/backward pairs of ``net``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (net.carrier_size,):
        raise DimensionError(f"vector of shape {c.shape} on {net.carrier_size} species")
    if not allow_boundary and np.any(c <= 0):
        raise BoundaryError("onsager_matrix is evaluated in the interior of the simplex")
    v, subs, prods, kappa = _pair_data(net)
    if not len(kappa):
        return np.zeros((net.carrier_size, net.carrier_size))
    ext = np.append(c, 1.0)
    w = kappa * log_mean(np.prod(ext[subs], axis=1), np.prod(ext[prods], axis=1))
    return (v.T * w) @ v


def gradient_rhs(net: ReactionNetwork, c) -> np.ndarray:
    """C(c) grad F(c); needs an interior point."""
    return onsager_matrix(net, c) @ grad_free_energy(c)


def _L(nu, i1, i2, j1, j2):
    return log_mean(nu[i1] * nu[i2], nu[j1] * nu[j2])


def two_locus_reference(nu, rho) -> np.ndarray:
    """Closed form of C(nu) for two parents and two diallelic loci.

    Types are ordered (0,0), (0,1), (1,0), (1,1).
    """
    nu = np.asarray(nu, dtype=float)
    pattern = np.array([[1, -1, -1, 1], [-1, 1, 1, -1], [-1, 1, 1, -1], [1, -1, -1, 1]], dtype=float)
    return rho * log_mean(nu[0] * nu[3], nu[2] * nu[1]) * pattern


def _embed(block, offset, level):
    """Place ``block`` at ``offset`` and mirror it with index a -> level - a."""
    k = block.shape[0]
    cover = range(offset, offset + k)

    def fold(a):
        if a in cover:
            return a - offset
        if level - a in cover:
            return level - a - offset
        return None

    out = np.zeros((8, 8))
    for a in range(8):
        fa = fold(a)
        if fa is None:
            continue
        for b in range(8):
            fb = fold(b)
            if fb is not None:
                out[a, b] = block[fa, fb]
    return out


def three_locus_classes(nu, rho1, rho2, rho3, verbatim=False) -> list:
    """Per-linkage-class 8 x 8 matrices for two parents and three diallelic loci.

    Type g_k is the type whose letters read k as a binary number.  ``rho_i``
    is the rate of cutting site i away from the other two.  Each linkage
    class is given by its upper-left (or lower-right) block and mirrored
    through a -> l - a, where l is the index sum of its complexes.

    The printed block for g0 + g3 <-> g2 + g1 has a negative diagonal entry
    in its second row; ``verbatim=True`` reproduces that entry, the default
    uses the sign forced by v v^T.
    """
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (8,):
        raise DimensionError("three-locus reference needs a vector over 8 types")
    if np.any(nu <= 0):
        raise BoundaryError("three-locus reference is evaluated in the interior")

    def two(k):
        return np.array([[k, -k], [-k, k]])

    def outer_skip(k, first, second):
        m = np.zeros((3, 3))
        m[first, first] = m[second, second] = k
        m[first, second] = m[second, first] = -k
        return m

    k06 = (rho1 + rho2) * _L(nu, 0, 6, 2, 4)
    k17 = (rho1 + rho2) * _L(nu, 1, 7, 3, 5)
    k05 = (rho1 + rho3) * _L(nu, 0, 5, 1, 4)
    k27 = (rho1 + rho3) * _L(nu, 2, 7, 3, 6)
    k03 = (rho2 + rho3) * _L(nu, 0, 3, 1, 2)
    k47 = (rho2 + rho3) * _L(nu, 4, 7, 5, 6)

    a03 = two(k03)
    if verbatim:
        a03[1, 1] = -k03

    L07_34, L07_25, L16_07 = _L(nu, 0, 7, 3, 4), _L(nu, 0, 7, 2, 5), _L(nu, 1, 6, 0, 7)
    L16_25, L16_34, L25_34 = _L(nu, 1, 6, 2, 5), _L(nu, 1, 6, 3, 4), _L(nu, 2, 5, 3, 4)
    big = np.array([
        [rho1 * L07_34 + rho2 * L07_25 + rho3 * L16_07, -rho3 * L16_07, -rho2 * L07_25, -rho1 * L07_34],
        [-rho3 * L16_07, rho1 * L16_25 + rho2 * L16_34 + rho3 * L16_07, -rho1 * L16_25, -rho2 * L16_34],
        [-rho2 * L07_25, -rho1 * L16_25, rho1 * L16_25 + rho2 * L07_25 + rho3 * L25_34, -rho3 * L25_34],
        [-rho1 * L07_34, -rho2 * L16_34, -rho3 * L25_34, rho1 * L07_34 + rho2 * L16_34 + rho3 * L25_34],
    ])

    classes = [
        (outer_skip(k06, 0, 2), 0, 6),
        (outer_skip(k17, 0, 2), 5, 8),
        (outer_skip(k05, 0, 1), 0, 5),
        (outer_skip(k27, 1, 2), 5, 9),
        (a03, 0, 3),
        (two(k47), 6, 11),
        (big, 0, 7),
    ]
    return [_embed(block, offset, level) for block, offset, level in classes]


def three_locus_reference(nu, rho1, rho2, rho3, verbatim=False) -> np.ndarray:
    """C(nu) for two parents and three diallelic loci: the sum of the linkage classes."""
    return sum(three_locus_classes(nu, rho1, rho2, rho3, verbatim))


def jacobi_eigenvalues(m, sweeps=12) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    a = np.array(m, dtype=float)
    n = a.shape[0]
    for _ in range(sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
    return np.sort(np.diag(a))


def psd_check(m, trials=200, seed=0, tol=PSD_TOL, report=False):
    """Certify positive semi-definiteness two independent ways.

    Passes iff the smallest quadratic form over ``trials`` seeded random unit
    vectors and the smallest Jacobi eigenvalue are both >= ``tol``.  With
    ``report=True`` returns (verdict, min quadratic form, min eigenvalue).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(m))) if m.size else 1.0):
        raise SymmetryError(f"matrix is not symmetric (max deviation {asym:.3e})")
    rng = seeded_rng(seed, 7)
    v = rng.standard_normal((trials, m.shape[0]))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    qmin = float(np.min(np.einsum("ij,jk,ik->i", v, m, v)))
    emin = float(jacobi_eigenvalues(m)[0])
    ok = qmin >= tol and emin >= tol
    return (ok, qmin, emin) if report else ok
