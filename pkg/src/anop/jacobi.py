"""Cyclic Jacobi eigensolver for self-adjoint matrices.

Chosen for self-contained determinism and orthogonality of the returned
eigenvectors. Complex Hermitian input goes through the standard real
2n x 2n embedding. Windows larger than 64 fall back to LAPACK (still
deterministic for a fixed input) since those only feed Numerical-tier
sweeps.
"""

import numpy as np

from .errors import NotSelfAdjoint

JACOBI_TOL = 1e-12
JACOBI_MAX_N = 64


def _jacobi_real(a, tol=JACOBI_TOL, max_sweeps=60):
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n < 2:
        return np.diag(a).copy(), v
    scale = np.linalg.norm(a) or 1.0
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-36 * abs(diff):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v


def _phase_normalize(vec):
    idx = np.argmax(np.abs(vec) > 1e-9) if np.any(np.abs(vec) > 1e-9) else 0
    pivot = vec[idx]
    if abs(pivot) > 0:
        vec = vec * (abs(pivot) / pivot)
    if abs(vec[idx].imag) < 1e-14:
        vec = np.where(np.abs(vec.imag) < 1e-16, vec.real + 0j, vec)
    return vec


def _order_pairs(w, v):
    """Descending eigenvalue, lexicographic tie-break on eigenvector entries."""
    cols = []
    for k in range(len(w)):
        vec = _phase_normalize(v[:, k].astype(complex))
        key = tuple(np.round(np.concatenate([vec.real, vec.imag]), 9))
        cols.append((-w[k], key, w[k], vec))
    cols.sort(key=lambda t: (round(t[0], 12), t[1]))
    wv = np.array([t[2] for t in cols])
    vv = np.column_stack([t[3] for t in cols]) if cols else np.zeros((0, 0), complex)
    return wv, vv


def hermitian_eig(m, tol=JACOBI_TOL):
    """Deterministic full eigensystem (w descending, columns of v)."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if n == 0:
        return np.array([]), np.zeros((0, 0), dtype=complex)
    if np.allclose(m.imag, 0.0, atol=0.0):
        if n <= JACOBI_MAX_N:
            w, v = _jacobi_real(m.real, tol)
        else:
            w, v = np.linalg.eigh(m.real)
        return _order_pairs(w, v.astype(complex))
    if n <= JACOBI_MAX_N:
        emb = np.block([[m.real, -m.imag], [m.imag, m.real]])
        w2, v2 = _jacobi_real(emb, tol)
    else:
        w, v = np.linalg.eigh(m)
        return _order_pairs(w, v)
    order = np.argsort(-w2, kind="stable")
    w2, v2 = w2[order], v2[:, order]
    # each complex eigenvector appears twice in the embedding; keep an
    # orthonormal half per eigenvalue cluster
    scale = max(np.max(np.abs(w2)), 1.0)
    picked_w, picked_v = [], []
    i = 0
    while i < len(w2):
        j = i
        while j < len(w2) and abs(w2[j] - w2[i]) <= 1e-9 * scale:
            j += 1
        cluster = [v2[:n, k] + 1j * v2[n:, k] for k in range(i, j)]
        kept = []
        for cand in cluster:
            u = cand.copy()
            for b in kept:
                u = u - b * np.vdot(b, u)
            nrm = np.linalg.norm(u)
            if nrm > 1e-8:
                kept.append(u / nrm)
        want = (j - i) // 2
        for u in kept[:want]:
            picked_w.append(w2[i])
            picked_v.append(u)
        i = j
    w = np.array(picked_w)
    v = np.column_stack(picked_v) if picked_v else np.zeros((n, 0), complex)
    return _order_pairs(w, v)


def sym_eigen(m, tol=1e-10):
    """Full spectrum with orthonormal eigenvectors of a self-adjoint matrix.

    Validates ||m - m*|| <= tol, returns [(eigenvalue, eigenvector)] in the
    deterministic order, with per-pair residual ||m v - w v|| <= 10 tol ||m||.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSelfAdjoint("matrix must be square")
    herm_dev = float(np.linalg.norm(m - m.conj().T))
    if herm_dev > tol:
        raise NotSelfAdjoint(f"||m - m*|| = {herm_dev:.3g} exceeds tol {tol:.3g}")
    mh = 0.5 * (m + m.conj().T)
    w, v = hermitian_eig(mh, min(JACOBI_TOL, tol))
    return [(float(w[k].real) if np.ndim(w[k]) == 0 else float(w[k]),
             v[:, k].copy()) for k in range(len(w))]
