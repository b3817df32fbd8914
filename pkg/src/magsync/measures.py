"""
Two-mode Gaussian measures: logarithmic negativity, purity and the
complete / phase synchronization of a pair of modes.

The two-mode block is ordered ``(X_1, P_1, X_2, P_2)`` and split as::

    C = [[X,   Z],
         [Z^T, Y]]
"""

import math
from dataclasses import dataclass

import numpy as np

from .lindyn import symplectic_eigenvalues

__all__ = [
    "TwoModeCM", "MeasureSet", "UnphysicalStateError",
    "extract_two_mode", "log_negativity", "nu_minus", "nu_minus_closed_form",
    "gamma_invariant", "purity", "difference_variances", "complete_sync",
    "phase_sync", "measure_all", "DISCRIMINANT_TOL", "SEPARABILITY_TOL",
]

DISCRIMINANT_TOL = 1e-12
# 2*nu_minus within this of 1 counts as separable
SEPARABILITY_TOL = 1e-12

MAGNON_PAIR = (0, 1)


class UnphysicalStateError(ValueError):
    pass


@dataclass(frozen=True)
class TwoModeCM:
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    @classmethod
    def from_matrix(cls, C):
        C = np.asarray(C, dtype=float)
        if C.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got {C.shape}")
        return cls(X=C[:2, :2].copy(), Y=C[2:, 2:].copy(), Z=C[:2, 2:].copy())

    @property
    def matrix(self):
        return np.block([[self.X, self.Z], [self.Z.T, self.Y]])


@dataclass(frozen=True)
class MeasureSet:
    E_dd: float
    purity: float
    S_c: float
    S_p: float
    nu_minus: float
    min_symplectic: float

    def as_dict(self):
        return {
            "E_dd": self.E_dd, "purity": self.purity, "S_c": self.S_c,
            "S_p": self.S_p, "nu_minus": self.nu_minus,
            "min_symplectic": self.min_symplectic,
        }


def _as_cm(cm):
    return cm if isinstance(cm, TwoModeCM) else TwoModeCM.from_matrix(cm)


def extract_two_mode(C, mode_pair=MAGNON_PAIR):
    """
    4x4 principal submatrix for two modes of a covariance matrix.

    ``mode_pair`` holds mode indices (quadrature pairs), so the default
    ``(0, 1)`` picks rows/columns 0-3: ``X_d1, P_d1, X_d2, P_d2``.
    """
    C = np.asarray(C, dtype=float)
    n_modes = C.shape[0] // 2
    i, j = mode_pair
    for m in (i, j):
        if not 0 <= m < n_modes:
            raise IndexError(f"mode index {m} out of range for {n_modes} modes")
    if i == j:
        raise IndexError("mode_pair must name two different modes")
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    return TwoModeCM.from_matrix(C[np.ix_(idx, idx)])


def gamma_invariant(cm):
    """``det X + det Y - 2 det Z``, the partially-transposed local invariant."""
    cm = _as_cm(cm)
    # LAPACK det of an exactly singular block warns but returns 0 correctly
    with np.errstate(divide="ignore"):
        return float(np.linalg.det(cm.X) + np.linalg.det(cm.Y) - 2.0 * np.linalg.det(cm.Z))


def nu_minus_closed_form(cm):
    """
    Smallest partially-transposed symplectic eigenvalue from the
    determinant formula ``sqrt((G - sqrt(G^2 - 4 det C))/2)``.

    Discriminants in ``[-DISCRIMINANT_TOL * max(1, G^2), 0)`` are clamped
    to 0; anything more negative raises :class:`UnphysicalStateError`.
    """
    cm = _as_cm(cm)
    g = gamma_invariant(cm)
    det = float(np.linalg.det(cm.matrix))
    disc = g * g - 4.0 * det
    if disc < 0:
        if disc < -DISCRIMINANT_TOL * max(1.0, g * g):
            raise UnphysicalStateError(f"negative discriminant {disc:.3e}")
        disc = 0.0
    inner = 0.5 * (g - math.sqrt(disc))
    if inner < 0:
        raise UnphysicalStateError(f"negative squared symplectic eigenvalue {inner:.3e}")
    return math.sqrt(inner)


def nu_minus(cm):
    """
    Smallest symplectic eigenvalue of the partial transpose (``P_2 -> -P_2``).

    Computed from a Hermitian eigenproblem; agrees with
    :func:`nu_minus_closed_form` but stays accurate when the two symplectic
    eigenvalues are nearly degenerate, where the closed form loses half of
    the significant digits.
    """
    C = _as_cm(cm).matrix
    flip = np.array([1.0, 1.0, 1.0, -1.0])
    return float(symplectic_eigenvalues(C * flip[:, None] * flip[None, :])[0])


def log_negativity(cm, base=math.e):
    """
    ``E = max(0, -log(2 nu_minus))``, natural log unless ``base`` is given.

    Values with ``2 nu_minus >= 1 - SEPARABILITY_TOL`` return exactly 0.
    """
    return _negativity_from_nu(nu_minus(cm), base)


def _negativity_from_nu(nu, base=math.e):
    if not nu > 0:
        raise UnphysicalStateError(f"non-positive symplectic eigenvalue {nu!r}")
    if 2.0 * nu >= 1.0 - SEPARABILITY_TOL:
        return 0.0
    return -math.log(2.0 * nu) / math.log(base)


def purity(cm):
    """``1 / (4 sqrt(det C))``; equals 1 for pure two-mode states."""
    det = float(np.linalg.det(_as_cm(cm).matrix))
    if not det > 0:
        raise UnphysicalStateError(f"non-positive determinant {det!r}")
    return 1.0 / (4.0 * math.sqrt(det))


def difference_variances(cm):
    """Variances of ``(X_1 - X_2)/sqrt(2)`` and ``(P_1 - P_2)/sqrt(2)``."""
    C = _as_cm(cm).matrix
    vx = 0.5 * (C[0, 0] + C[2, 2] - 2.0 * C[0, 2])
    vp = 0.5 * (C[1, 1] + C[3, 3] - 2.0 * C[1, 3])
    return float(vx), float(vp)


def complete_sync(cm):
    vx, vp = difference_variances(cm)
    total = vx + vp
    if not total > 0:
        raise UnphysicalStateError(f"non-positive difference variance {total!r}")
    return 1.0 / total


def phase_sync(cm):
    _, vp = difference_variances(cm)
    if not vp > 0:
        raise UnphysicalStateError(f"non-positive momentum-difference variance {vp!r}")
    return 1.0 / (2.0 * vp)


def measure_all(C, mode_pair=MAGNON_PAIR):
    """All two-mode measures of the magnon pair (by default) of a full covariance matrix."""
    cm = extract_two_mode(C, mode_pair)
    nu = nu_minus(cm)
    return MeasureSet(
        E_dd=_negativity_from_nu(nu),
        purity=purity(cm),
        S_c=complete_sync(cm),
        S_p=phase_sync(cm),
        nu_minus=nu,
        min_symplectic=float(symplectic_eigenvalues(np.asarray(C, dtype=float))[0]),
    )
