"""
Independent reference computations used by the tests.

Nothing here calls into the code paths it checks: the drift matrix is
rebuilt from the complex-amplitude equations, stability is decided by an
exact rational Routh-Hurwitz test, occupations use mpmath.
"""

import math
from fractions import Fraction

import mpmath
import numpy as np

SQ2 = math.sqrt(2.0)


def thermal_occupation_mp(omega, T, dps=50):
    with mpmath.workdps(dps):
        if T == 0:
            return mpmath.mpf(0)
        x = mpmath.mpf("1.054571817e-34") * omega / (mpmath.mpf("1.380649e-23") * T)
        return 1 / mpmath.expm1(x)


# -- drift matrix from the complex equations --------------------------------

# vector v = [d1, d1+, d2, d2+, q1, p1, q2, p2, a1, a1+, a2, a2+, c1, c1+, c2, c2+]
_MODES = {"d1": 0, "d2": 2, "a1": 8, "a2": 10, "c1": 12, "c2": 14}


def complex_drift(cfg, G=None):
    """Drift in the (o, o^dag) basis, written term by term from the linearized equations."""
    if G is None:
        G = (cfg.site(1).G_db, cfg.site(2).G_db)
    M = np.zeros((16, 16), dtype=complex)

    def add(target, source, coeff):
        # o_target' += coeff * source, and the conjugate row
        ti = _MODES.get(target)
        si, s_dag = source
        M[ti, si] += coeff
        M[ti + 1, s_dag] += np.conj(coeff)

    for j, s in ((1, 2), (2, 1)):
        p = cfg.site(j)
        a, c, d = f"a{j}", f"c{j}", f"d{j}"
        A = (_MODES[a], _MODES[a] + 1)
        Cc = (_MODES[c], _MODES[c] + 1)
        D = (_MODES[d], _MODES[d] + 1)
        As = (_MODES[f"a{s}"], _MODES[f"a{s}"] + 1)
        Cs = (_MODES[f"c{s}"], _MODES[f"c{s}"] + 1)

        add(a, A, -(1j * p.delta_a + p.kappa_a))
        add(a, D, -1j * p.g_a)
        add(a, As, 1j * cfg.J_a)
        add(c, Cc, -(1j * p.delta_c + p.kappa_c))
        add(c, D, -1j * p.g_c)
        add(c, Cs, 1j * cfg.J_c)
        add(d, D, -(1j * p.delta_d + p.kappa_d))
        add(d, A, -1j * p.g_a)
        add(d, Cc, -1j * p.g_c)
        # squeezing couples d to d^dag
        add(d, (D[1], D[0]), 2 * p.lam * np.exp(1j * cfg.theta))

        q, pp = 4 + 2 * (j - 1), 5 + 2 * (j - 1)
        if cfg.full_linearization:
            M[D[0], q] += -G[j - 1] / SQ2
            M[D[1], q] += -G[j - 1] / SQ2
        M[q, pp] = p.omega_b
        M[pp, q] = -p.omega_b
        M[pp, pp] = -p.gamma_b
        # i G (d^dag - d)/sqrt(2)
        M[pp, D[1]] += 1j * G[j - 1] / SQ2
        M[pp, D[0]] += -1j * G[j - 1] / SQ2
    return M


def quadrature_transform():
    T = np.zeros((16, 16), dtype=complex)
    for k in range(8):
        i = 2 * k
        if i in (4, 6):
            T[i, i] = T[i + 1, i + 1] = 1.0
            continue
        # X = (o + o^dag)/sqrt2, P = i(o^dag - o)/sqrt2
        T[i, i], T[i, i + 1] = 1 / SQ2, 1 / SQ2
        T[i + 1, i], T[i + 1, i + 1] = -1j / SQ2, 1j / SQ2
    return T


def drift_oracle(cfg, G=None):
    T = quadrature_transform()
    K = T @ complex_drift(cfg, G) @ np.linalg.inv(T)
    assert np.max(np.abs(K.imag)) < 1e-6 * max(1.0, np.max(np.abs(K.real)))
    return K.real


# -- exact Routh-Hurwitz -----------------------------------------------------

def charpoly_exact(K):
    """Faddeev-LeVerrier in exact rationals, returns ``[1, c1, ..., cn]``."""
    n = len(K)
    A = [[Fraction(float(x)) for x in row] for row in K]
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        Mk = [[sum(A[i][l] * Mk[l][j] for l in range(n)) + (coeffs[-1] if i == j else 0)
               for j in range(n)] for i in range(n)]
        AM_trace = sum(sum(A[i][l] * Mk[l][i] for l in range(n)) for i in range(n))
        coeffs.append(-AM_trace / k)
    return coeffs


def routh_hurwitz_stable(K):
    """True iff every root of det(sI - K) has negative real part (strict Routh test)."""
    K = np.ldexp(np.asarray(K, dtype=float), -int(np.ceil(np.log2(np.max(np.abs(K)) + 1))))
    a = charpoly_exact(K.tolist())
    if any(x <= 0 for x in a):
        return False
    r1, r2 = a[0::2], a[1::2]
    while r2:
        if r2[0] <= 0:
            return False
        nxt = []
        for i in range(len(r1) - 1):
            b = r2[i + 1] if i + 1 < len(r2) else Fraction(0)
            nxt.append(r1[i + 1] - r1[0] / r2[0] * b)
        r1, r2 = r2, nxt
    return True


# -- analytic states ---------------------------------------------------------

def tmsv(r, sign=1.0):
    """Two-mode squeezed vacuum with Z = sign * sinh(2r)/2 * diag(1, -1)."""
    ch, sh = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
    C = np.zeros((4, 4))
    C[:2, :2] = C[2:, 2:] = ch * np.eye(2)
    Z = sign * sh * np.diag([1.0, -1.0])
    C[:2, 2:] = Z
    C[2:, :2] = Z.T
    return C


def thermal_pair(N1, N2=None):
    N2 = N1 if N2 is None else N2
    return np.diag([N1 + 0.5, N1 + 0.5, N2 + 0.5, N2 + 0.5])


def random_local_symplectic(rng):
    """Random single-mode symplectic (rotation * squeeze * rotation)."""
    def rot(phi):
        return np.array([[math.cos(phi), math.sin(phi)], [-math.sin(phi), math.cos(phi)]])
    s = math.exp(rng.uniform(-1, 1))
    return rot(rng.uniform(0, 2 * math.pi)) @ np.diag([s, 1 / s]) @ rot(rng.uniform(0, 2 * math.pi))
