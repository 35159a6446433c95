"""Straight-from-the-formulas reference for one ADMM sweep, written with
explicit loops and an independent eigensolver so the library implementation
can be cross-checked against it."""

import numpy as np
import scipy.linalg


def naive_toeplitz(u):
    n = u.size
    T = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if j >= i:
                T[i, j] = u[j - i]
            else:
                T[i, j] = np.conj(u[i - j])
    T[np.diag_indices(n)] = u[0].real
    return T


def naive_toeplitz_adjoint(M):
    n = M.shape[0]
    out = np.zeros(n, dtype=complex)
    for j in range(n):
        for i in range(n - j):
            out[j] += M[i, i + j]
    return out


def naive_prox(v, tau):
    out = np.zeros_like(v)
    for i, vi in enumerate(v):
        if abs(vi) > tau:
            out[i] = vi / abs(vi) * (abs(vi) - tau)
    return out


def naive_psd_project(H):
    H = 0.5 * (H + H.conj().T)
    w, V = scipy.linalg.eigh(H)
    w = np.where(w > 0, w, 0.0)
    out = V @ np.diag(w) @ V.conj().T
    return 0.5 * (out + out.conj().T)


def naive_iterate(y, t, u, g, z, Psi, Upsilon, xi, lam_prime, rho):
    """One sweep of the closed-form updates in the order t, u, g, z, then the
    consensus projection and the multiplier step on the fresh block."""
    n = y.size
    t1 = Psi[n, n].real + (Upsilon[n, n].real - xi / 2.0) / rho
    w = naive_toeplitz_adjoint(Psi[:n, :n] + Upsilon[:n, :n] / rho)
    u1 = np.zeros(n, dtype=complex)
    for j in range(n):
        u1[j] = w[j] / (n - j)
    u1[0] -= xi / (2.0 * rho)
    g1 = (y - z + 2.0 * rho * Psi[:n, n] + 2.0 * Upsilon[:n, n]) / (2.0 * rho + 1.0)
    z1 = naive_prox(y - g1, lam_prime)
    G1 = np.zeros((n + 1, n + 1), dtype=complex)
    G1[:n, :n] = naive_toeplitz(u1)
    G1[:n, n] = g1
    G1[n, :n] = np.conj(g1)
    G1[n, n] = t1
    Psi1 = naive_psd_project(G1 - Upsilon / rho)
    Ups1 = Upsilon + rho * (Psi1 - G1)
    Ups1 = 0.5 * (Ups1 + Ups1.conj().T)
    return t1, u1, g1, z1, Psi1, Ups1
