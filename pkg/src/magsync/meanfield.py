"""
Steady mean-field amplitudes and the effective magnomechanical coupling.

The steady-state equations are linear in the twelve real unknowns
(Re/Im of a1, a2, c1, c2, d1, d2) because the squeezing term couples each
magnon amplitude to its conjugate. They are solved as one dense real
system.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .physpar import ConfigError

__all__ = [
    "OperatingPoint", "SingularSystemError",
    "solve_operating_point", "effective_coupling", "calibrate_g_db",
    "coupling_from_config",
]

# complex unknown order
_A1, _A2, _C1, _C2, _D1, _D2 = range(6)


class SingularSystemError(np.linalg.LinAlgError):
    def __init__(self, cond):
        self.cond = cond
        super().__init__(f"mean-field system is singular (condition estimate {cond:.3e})")


@dataclass(frozen=True)
class OperatingPoint:
    a1: complex
    a2: complex
    c1: complex
    c2: complex
    d1: complex
    d2: complex
    q1: float
    q2: float
    G1: complex
    G2: complex
    g_db: float = 0.0
    residual: float = 0.0
    cond: float = 1.0
    extra: dict = field(default_factory=dict)

    def to_json(self):
        def c(z):
            return {"re": float(np.real(z)), "im": float(np.imag(z))}

        doc = {
            "amplitudes": {k: c(getattr(self, k)) for k in ("a1", "a2", "c1", "c2", "d1", "d2")},
            "q": [self.q1, self.q2],
            "G": [c(self.G1), c(self.G2)],
            "g_db_bare": self.g_db,
            "residual": self.residual,
            "condition_estimate": self.cond,
        }
        doc.update(self.extra)
        return json.dumps(doc, indent=2, sort_keys=True)


def _complex_system(config, delta_d_shift=(0.0, 0.0)):
    """
    Complex form ``M z + N conj(z) + b = 0`` of the steady-state equations.
    """
    s1, s2 = config.site(1), config.site(2)
    drive = config.drive
    M = np.zeros((6, 6), dtype=complex)
    N = np.zeros((6, 6), dtype=complex)
    b = np.zeros(6, dtype=complex)
    E = drive.E
    Om = drive.rabi
    phase = np.exp(1j * config.theta)
    for j, (s, a, c, d, a_o, c_o) in enumerate((
            (s1, _A1, _C1, _D1, _A2, _C2),
            (s2, _A2, _C2, _D2, _A1, _C1))):
        M[a, a] = -(1j * s.delta_a + s.kappa_a)
        M[a, d] = -1j * s.g_a
        M[a, a_o] = 1j * config.J_a
        M[c, c] = -(1j * s.delta_c + s.kappa_c)
        M[c, d] = -1j * s.g_c
        M[c, c_o] = 1j * config.J_c
        M[d, d] = -(1j * (s.delta_d + delta_d_shift[j]) + s.kappa_d)
        M[d, a] = -1j * s.g_a
        M[d, c] = -1j * s.g_c
        N[d, d] = 2.0 * s.lam * phase
        b[d] = Om
    b[_A1] += -1j * E
    b[_C1] += -1j * E
    return M, N, b


def _solve_linear(M, N, b):
    n = M.shape[0]
    # z = x + i y ; real block form of M z + N conj(z) = -b
    A = np.block([[M.real + N.real, -M.imag + N.imag],
                  [M.imag + N.imag, M.real - N.real]])
    rhs = -np.concatenate([b.real, b.imag])
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularSystemError(cond)
    sol = np.linalg.solve(A, rhs)
    z = sol[:n] + 1j * sol[n:]
    res = M @ z + N @ np.conj(z) + b
    scale = max(np.max(np.abs(M @ z)), np.max(np.abs(N @ np.conj(z))), np.max(np.abs(b)), 1e-300)
    return z, cond, float(np.max(np.abs(res)) / scale)


def solve_operating_point(config, max_iter=200, rtol=1e-13):
    """
    Solve the steady mean-field equations for a driven configuration.

    The magnon drive ``Omega`` acts on both magnons, the cavity drive ``E``
    on the site-1 cavities. The c-mode hopping uses ``J_c``. With
    ``config.fold_mean_field_shift`` the detuning of each magnon becomes
    ``delta_d + g_db*q_j``; that makes the problem nonlinear and it is
    solved by fixed-point iteration on ``q``.

    Raises
    ------
    ConfigError
        If ``config.drive`` is missing.
    SingularSystemError
        If the linear system is numerically singular.
    """
    if config.drive is None:
        raise ConfigError("solve_operating_point needs a [drive] section")
    g_db = config.drive.g_db_bare
    w1, w2 = config.site(1).omega_b, config.site(2).omega_b
    shift = (0.0, 0.0)
    iterations = 0
    while True:
        M, N, b = _complex_system(config, shift)
        z, cond, residual = _solve_linear(M, N, b)
        q1 = -g_db * abs(z[_D1]) ** 2 / w1
        q2 = -g_db * abs(z[_D2]) ** 2 / w2
        if not config.fold_mean_field_shift:
            break
        new_shift = (g_db * q1, g_db * q2)
        iterations += 1
        delta = max(abs(new_shift[0] - shift[0]), abs(new_shift[1] - shift[1]))
        shift = new_shift
        if delta <= rtol * max(1.0, abs(shift[0]), abs(shift[1])):
            break
        if iterations >= max_iter:
            raise np.linalg.LinAlgError(
                f"mean-field shift iteration did not converge in {max_iter} steps")
    root2 = math.sqrt(2.0)
    extra = {"delta_d_shift": list(shift)} if config.fold_mean_field_shift else {}
    return OperatingPoint(
        a1=complex(z[_A1]), a2=complex(z[_A2]),
        c1=complex(z[_C1]), c2=complex(z[_C2]),
        d1=complex(z[_D1]), d2=complex(z[_D2]),
        q1=q1, q2=q2,
        G1=complex(1j * root2 * g_db * z[_D1]),
        G2=complex(1j * root2 * g_db * z[_D2]),
        g_db=g_db, residual=residual, cond=float(cond), extra=extra,
    )


def _wrap(phi):
    # to (-pi, pi]
    out = math.remainder(phi, 2.0 * math.pi)
    return math.pi if out == -math.pi else out


def effective_coupling(op):
    """
    Real effective couplings under the phase convention ``arg<d_j> = -pi/2``.

    Returns
    -------
    G : tuple of float
        ``|G_1|, |G_2|`` in rad/s.
    rotation : tuple of float
        Global phase discarded per site, ``arg<d_j> + pi/2`` wrapped to
        (-pi, pi]; zero when the amplitude already has the convention phase
        or vanishes.
    """
    G, rot = [], []
    for d in (op.d1, op.d2):
        mag = math.sqrt(2.0) * abs(op.g_db) * abs(d)
        G.append(mag)
        rot.append(0.0 if d == 0 else _wrap(math.atan2(d.imag, d.real) + math.pi / 2.0))
    return tuple(G), tuple(rot)


def calibrate_g_db(config, target_G):
    """
    Bare coupling that makes site 1 reach ``|G| == target_G`` (rad/s).

    Only valid when the mean-field shift is not folded in, where ``<d>``
    does not depend on ``g_db``.
    """
    if config.drive is None:
        raise ConfigError("calibrate_g_db needs a [drive] section")
    if config.fold_mean_field_shift:
        raise ConfigError("calibrate_g_db assumes fold_mean_field_shift is off")
    M, N, b = _complex_system(config)
    z, _, _ = _solve_linear(M, N, b)
    d = abs(z[_D1])
    if d == 0:
        raise ValueError("magnon amplitude vanishes; any g_db gives G = 0")
    return target_G / (math.sqrt(2.0) * d)


def coupling_from_config(config):
    """Per-site real ``G_db`` used by the linear model."""
    if config.drive is None:
        return config.site(1).G_db, config.site(2).G_db
    G, _ = effective_coupling(solve_operating_point(config))
    return G
