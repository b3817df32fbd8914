"""
Linearized Gaussian dynamics of the 16 quadrature fluctuations.

Quadrature order (fixed everywhere in the package)::

    0  X_d1   1  P_d1   2  X_d2   3  P_d2
    4  q1     5  p1     6  q2     7  p2
    8  X_a1   9  P_a1  10  X_a2  11  P_a2
   12  X_c1  13  P_c1  14  X_c2  15  P_c2

with ``X = (o + o^dag)/sqrt(2)`` and ``P = i(o^dag - o)/sqrt(2)``, so the
vacuum covariance matrix is ``I/2``.
"""

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .physpar import thermal_occupation, config_hash, dump_config

__all__ = [
    "ORDERING", "MAGNON_SLICE", "N_QUAD",
    "LinearModel", "StabilityReport",
    "InstabilityError", "IllConditionedWarning", "IntegrationError",
    "assemble_drift", "assemble_diffusion", "build_model",
    "stability", "steady_covariance", "lyapunov_residual",
    "evolve_covariance", "symplectic_form", "symplectic_eigenvalues",
    "physicality_check", "is_physical", "PHYSICALITY_SLACK",
    "dump_arrays", "load_arrays",
]

ORDERING = (
    "X_d1", "P_d1", "X_d2", "P_d2", "q1", "p1", "q2", "p2",
    "X_a1", "P_a1", "X_a2", "P_a2", "X_c1", "P_c1", "X_c2", "P_c2",
)
N_QUAD = 16
MAGNON_SLICE = slice(0, 4)
PHYSICALITY_SLACK = 1e-9

# (X index, P index) of each mode, per site
_D = ((0, 1), (2, 3))
_B = ((4, 5), (6, 7))
_A = ((8, 9), (10, 11))
_C = ((12, 13), (14, 15))


class InstabilityError(RuntimeError):
    def __init__(self, max_real_part):
        self.max_real_part = max_real_part
        super().__init__(f"drift matrix is not stable (max real part {max_real_part:.6g} rad/s)")


class IllConditionedWarning(RuntimeWarning):
    pass


class IntegrationError(RuntimeError):
    def __init__(self, message, time=None):
        self.time = time
        super().__init__(message if time is None else f"{message} at t={time:.6g} s")


@dataclass(frozen=True)
class LinearModel:
    K: np.ndarray
    L: np.ndarray
    ordering: tuple = ORDERING


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    max_real_part: float
    stable: bool


def assemble_drift(config, G=None, delta_d_shift=(0.0, 0.0)):
    """
    Drift matrix ``K`` of the linearized fluctuation dynamics.

    Parameters
    ----------
    config : SystemConfig
    G : pair of float, optional
        Real effective couplings per site. Defaults to ``config.G_db``.
    delta_d_shift : pair of float
        Additive magnon detuning shift per site (mean-field frequency pull).

    Notes
    -----
    Phonons are driven by ``G * P_d``. The reverse term ``-G * q`` in the
    ``X_d`` equation is only included with ``config.full_linearization``.
    """
    if G is None:
        G = (config.site(1).G_db, config.site(2).G_db)
    K = np.zeros((N_QUAD, N_QUAD))
    ct, st = math.cos(config.theta), math.sin(config.theta)
    for j, s in ((0, 1), (1, 0)):
        p = config.site(j + 1)
        lam = p.lam
        dd = p.delta_d + delta_d_shift[j]
        xd, pd = _D[j]
        q, pb = _B[j]
        xa, pa = _A[j]
        xc, pc = _C[j]
        xa_s, pa_s = _A[s]
        xc_s, pc_s = _C[s]

        K[xd, xd] = 2 * lam * ct - p.kappa_d
        K[xd, pd] = dd + 2 * lam * st
        K[xd, pa] = p.g_a
        K[xd, pc] = p.g_c
        K[pd, xd] = 2 * lam * st - dd
        K[pd, pd] = -(2 * lam * ct + p.kappa_d)
        K[pd, xa] = -p.g_a
        K[pd, xc] = -p.g_c
        if config.full_linearization:
            K[xd, q] = -G[j]

        K[q, pb] = p.omega_b
        K[pb, q] = -p.omega_b
        K[pb, pb] = -p.gamma_b
        K[pb, pd] = G[j]

        K[xa, xa] = -p.kappa_a
        K[xa, pa] = p.delta_a
        K[xa, pd] = p.g_a
        K[xa, pa_s] = -config.J_a
        K[pa, xa] = -p.delta_a
        K[pa, pa] = -p.kappa_a
        K[pa, xd] = -p.g_a
        K[pa, xa_s] = config.J_a

        K[xc, xc] = -p.kappa_c
        K[xc, pc] = p.delta_c
        K[xc, pd] = p.g_c
        K[xc, pc_s] = -config.J_c
        K[pc, xc] = -p.delta_c
        K[pc, pc] = -p.kappa_c
        K[pc, xd] = -p.g_c
        K[pc, xc_s] = config.J_c
    return K


def assemble_diffusion(config):
    """Diagonal diffusion matrix with thermal occupations at temperature ``config.T``."""
    diag = np.zeros(N_QUAD)
    T = config.T
    for j in range(2):
        p = config.site(j + 1)
        Nd = thermal_occupation(p.omega_d, T)
        nb = thermal_occupation(p.omega_b, T)
        Na = thermal_occupation(p.omega_a, T)
        Nc = thermal_occupation(p.omega_c, T)
        diag[list(_D[j])] = p.kappa_d * (1 + 2 * Nd)
        diag[_B[j][1]] = p.gamma_b * (1 + 2 * nb)
        diag[list(_A[j])] = p.kappa_a * (1 + 2 * Na)
        diag[list(_C[j])] = p.kappa_c * (1 + 2 * Nc)
    return np.diag(diag)


def build_model(config):
    """Drift and diffusion for ``config``; solves the mean field first when driven."""
    shift = (0.0, 0.0)
    if config.drive is None:
        G = (config.site(1).G_db, config.site(2).G_db)
    else:
        from .meanfield import effective_coupling, solve_operating_point

        op = solve_operating_point(config)
        G, _ = effective_coupling(op)
        if config.fold_mean_field_shift:
            shift = tuple(op.extra["delta_d_shift"])
    return LinearModel(K=assemble_drift(config, G, shift), L=assemble_diffusion(config))


def stability(K):
    """
    Eigenvalues of the drift matrix and the stability verdict.

    LAPACK ``geev`` balances, reduces to Hessenberg form and runs shifted
    QR; a non-converged iteration raises ``LinAlgError``.
    """
    K = np.asarray(K, dtype=float)
    if not np.all(np.isfinite(K)):
        raise ValueError("drift matrix contains non-finite entries")
    ev = np.linalg.eigvals(K)
    mrp = float(np.max(ev.real))
    return StabilityReport(eigenvalues=ev, max_real_part=mrp, stable=mrp < 0)


def lyapunov_residual(K, C, L):
    """``||K C + C K^T + L||_F / ||L||_F`` (absolute norm when ``L == 0``)."""
    R = K @ C + C @ K.T + L
    nL = np.linalg.norm(L)
    return float(np.linalg.norm(R) / (nL if nL > 0 else 1.0))


def steady_covariance(K, L, check_stability=True, cond_warn=1e12):
    """
    Steady covariance matrix solving ``K C + C K^T + L = 0``.

    The equation is vectorized as ``(I (x) K + K (x) I) vec(C) = -vec(L)``
    and solved by dense LU. The result is symmetrized.

    Raises
    ------
    InstabilityError
        If ``K`` has an eigenvalue with non-negative real part.
    """
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    n = K.shape[0]
    ev = np.linalg.eigvals(K) if (check_stability or cond_warn is not None) else None
    if check_stability:
        mrp = float(np.max(ev.real))
        if not mrp < 0:
            raise InstabilityError(mrp)
    eye = np.eye(n)
    A = np.kron(eye, K) + np.kron(K, eye)
    # column-major vec
    vecC = np.linalg.solve(A, -L.reshape(-1, order="F"))
    C = vecC.reshape(n, n, order="F")
    C = 0.5 * (C + C.T)
    if cond_warn is not None:
        # spread of the Kronecker-sum spectrum as a cheap conditioning proxy
        sums = np.abs(ev[:, None] + ev[None, :])
        est = sums.max() / max(sums.min(), 1e-300)
        if est > cond_warn:
            warnings.warn(f"Lyapunov operator ill-conditioned (estimate {est:.3e})",
                          IllConditionedWarning, stacklevel=2)
    return C


def _rk4_step(K, L, C, h):
    def f(X):
        KX = K @ X
        return KX + KX.T + L

    k1 = f(C)
    k2 = f(C + 0.5 * h * k1)
    k3 = f(C + 0.5 * h * k2)
    k4 = f(C + h * k3)
    out = C + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (out + out.T)


def evolve_covariance(K, L, C0=None, t_grid=None, step_factor=0.05, extra_rate=0.0):
    """
    Integrate ``dC/dt = K C + C K^T + L`` with classical fixed-step RK4.

    Parameters
    ----------
    K, L : ndarray
        Drift and diffusion.
    C0 : ndarray, optional
        Initial covariance, default vacuum ``I/2``.
    t_grid : array_like
        Strictly increasing sample times starting at 0.
    step_factor : float
        Internal step ``h <= step_factor / (||K||_inf + extra_rate)``; each
        sample interval is split into equal sub-steps satisfying the bound.
    extra_rate : float
        Added to the rate bound (the model passes the mechanical frequency).

    Returns
    -------
    ndarray, shape (len(t_grid), n, n)
    """
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    n = K.shape[0]
    C = 0.5 * np.eye(n) if C0 is None else np.array(C0, dtype=float)
    if t_grid is None:
        raise ValueError("t_grid is required")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing and start at 0")
    rate = np.linalg.norm(K, np.inf) + extra_rate
    h_max = step_factor / rate if rate > 0 else math.inf

    out = np.empty((t.size, n, n))
    out[0] = C
    for i in range(1, t.size):
        dt = t[i] - t[i - 1]
        nsub = max(1, math.ceil(dt / h_max))
        h = dt / nsub
        if h <= 0 or t[i - 1] + h == t[i - 1]:
            raise IntegrationError("step size underflow", t[i - 1])
        for _ in range(nsub):
            C = _rk4_step(K, L, C, h)
        if not np.all(np.isfinite(C)):
            raise IntegrationError("non-finite covariance", t[i])
        out[i] = C
    return out


def symplectic_form(n_modes):
    """Block-diagonal symplectic form for (x, p) ordered pairs."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(C):
    """
    Symplectic eigenvalues of ``C`` in ascending order (one per mode).

    For positive-definite ``C = R R^T`` the spectrum of ``i Omega C`` equals
    that of the Hermitian matrix ``R^T (i Omega) R``, which keeps the result
    well conditioned near degenerate spectra. Otherwise the moduli of the
    eigenvalues of ``i Omega C`` are used directly.
    """
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    if C.ndim != 2 or n != C.shape[1] or n % 2:
        raise ValueError(f"expected an even square matrix, got shape {C.shape}")
    Om = symplectic_form(n // 2)
    try:
        R = np.linalg.cholesky(0.5 * (C + C.T))
        ev = np.linalg.eigvalsh(R.T @ (1j * Om) @ R)
        nu = np.abs(ev)
    except np.linalg.LinAlgError:
        nu = np.abs(np.linalg.eigvals(1j * Om @ C))
    nu = np.sort(nu)
    # eigenvalues come in +-nu pairs
    return nu[::2]


def physicality_check(C):
    """Smallest symplectic eigenvalue; the state is physical iff it is >= 1/2 - 1e-9."""
    return float(symplectic_eigenvalues(C)[0])


def is_physical(C, slack=PHYSICALITY_SLACK):
    return physicality_check(C) >= 0.5 - slack


def dump_arrays(path, model, C=None, config=None):
    """
    Write ``K``, ``L`` (and ``C``) to ``path``.

    Layout: one JSON header line (ordering, units, shapes, config hash),
    newline, then the raw little-endian float64 arrays in column-major
    order, concatenated in header order.
    """
    arrays = {"K": model.K, "L": model.L}
    if C is not None:
        arrays["C"] = np.asarray(C, dtype=float)
    header = {
        "format": "magsync-arrays-1",
        "ordering": list(model.ordering),
        "units": {"K": "rad/s", "L": "rad/s", "C": "dimensionless"},
        "dtype": "<f8",
        "order": "F",
        "arrays": [[k, list(v.shape)] for k, v in arrays.items()],
        "config_sha256": None if config is None else config_hash(config),
        "config": None if config is None else dump_config(config),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        for v in arrays.values():
            fh.write(np.asarray(v, dtype="<f8").tobytes(order="F"))


def load_arrays(path):
    """Inverse of :func:`dump_arrays`; returns ``(header, {name: array})``."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        out = {}
        for name, shape in header["arrays"]:
            count = int(np.prod(shape))
            data = np.frombuffer(fh.read(8 * count), dtype="<f8")
            out[name] = data.reshape(shape, order="F").copy()
    return header, out
