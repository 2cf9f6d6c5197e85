"""Independent reference implementations used only by the test suite.

Everything here is deliberately built along a different route than the
package code (time stepping instead of linear solves, dense 9x9 null-space
instead of Schur elimination, polynomial root enumeration instead of the
stable quadratic form) so agreement is meaningful.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp


def evolve_two_level_to_steady(rabi: float, delta: float, gamma: float,
                               rhs_norm_tol: float = 1e-12) -> np.ndarray:
    """Integrate the reduced master equation until the flow stalls.

    Hamiltonian [[-i*gamma/2, -rabi/2], [-rabi/2, -delta]] plus the
    incoherent refill of |2> at gamma*rho11; starts from everything in |2>.
    """
    h = np.array([[-0.5j * gamma, -0.5 * rabi],
                  [-0.5 * rabi, -delta]], dtype=complex)

    def rhs_mat(rho: np.ndarray) -> np.ndarray:
        out = -1j * (h @ rho - rho @ h.conj().T)
        out[1, 1] += gamma * rho[0, 0]
        return out

    def rhs(_t, y):
        rho = y.reshape(2, 2).astype(complex)
        return rhs_mat(rho).ravel()

    y0 = np.zeros(4, dtype=complex)
    y0[3] = 1.0
    scale = max(abs(rabi), abs(delta), gamma)
    t_end = 60.0 / gamma
    for _ in range(12):
        sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853",
                        rtol=1e-12, atol=1e-14)
        y0 = sol.y[:, -1]
        rho = y0.reshape(2, 2)
        if np.linalg.norm(rhs_mat(rho)) < rhs_norm_tol * scale:
            return rho
    raise RuntimeError("two-level evolution did not reach steady state")


def three_level_liouvillian_dense(omega_L, omega_P, delta_p, delta_diff,
                                  gamma_eff, gamma_3, invert_pump=False,
                                  branch_to_1=0.5, pump_frame_offset=0.0):
    """9x9 Liouvillian assembled element-by-element from the equations of
    motion (complex Hamiltonian + explicit source terms), column-stacked."""
    s = pump_frame_offset
    h = np.array([
        [delta_diff, 0.0, -0.5 * omega_L],
        [0.0, -s, 0.5 * omega_P],
        [-0.5 * omega_L, 0.5 * omega_P, -delta_p - s],
    ], dtype=complex)
    # non-Hermitian decay part on the diagonal
    decay = np.zeros(3)
    if invert_pump:
        decay[1] = gamma_eff
    else:
        decay[0] = gamma_eff
    decay[2] = gamma_3

    lv = np.zeros((9, 9), dtype=complex)

    def idx(i, j):  # column-stacking: vec index of rho[i, j]
        return j * 3 + i

    for i in range(3):
        for j in range(3):
            row = idx(i, j)
            for k in range(3):
                lv[row, idx(k, j)] += -1j * h[i, k]
                lv[row, idx(i, k)] += 1j * np.conj(h[j, k])
            lv[row, idx(i, j)] += -0.5 * (decay[i] + decay[j])
    # refill terms
    if invert_pump:
        lv[idx(0, 0), idx(1, 1)] += gamma_eff
    else:
        lv[idx(1, 1), idx(0, 0)] += gamma_eff
    lv[idx(0, 0), idx(2, 2)] += gamma_3 * branch_to_1
    lv[idx(1, 1), idx(2, 2)] += gamma_3 * (1.0 - branch_to_1)
    return lv


def three_level_steady_dense(omega_L, omega_P, delta_p, delta_diff,
                             gamma_eff, gamma_3, invert_pump=False,
                             branch_to_1=0.5, pump_frame_offset=0.0):
    """Steady state via the trace-constrained dense solve of the 9x9 system."""
    lv = three_level_liouvillian_dense(omega_L, omega_P, delta_p, delta_diff,
                                       gamma_eff, gamma_3, invert_pump,
                                       branch_to_1, pump_frame_offset)
    a = lv.copy()
    a[0, :] = 0.0
    a[0, [0, 4, 8]] = 1.0
    b = np.zeros(9, dtype=complex)
    b[0] = 1.0
    scale = np.max(np.abs(a), axis=1)
    x = np.linalg.solve(a / scale[:, None], b / scale)
    return x.reshape(3, 3, order="F")


def positive_clamped_field_roots(zeta1, eta1, zeta2, eta2, q):
    """All real positive E^2 roots of the clamp equation via numpy.roots."""
    # zeta1 (E2+eta2) - zeta2 (E2+eta1) = (E2+eta1)(E2+eta2) / (2 q)
    coeffs = [1.0 / (2.0 * q),
              (eta1 + eta2) / (2.0 * q) - zeta1 + zeta2,
              eta1 * eta2 / (2.0 * q) - zeta1 * eta2 + zeta2 * eta1]
    roots = np.roots(coeffs)
    return sorted(r.real for r in roots if abs(r.imag) < 1e-9 * abs(r) + 1e-30
                  and r.real > 0.0)


def linear_index_root(alpha, omega0, delta_p):
    """Exact resonance root for the linear-index medium via the quadratic."""
    coeffs = [alpha, 1.0 + alpha * omega0 - alpha * delta_p, -alpha * omega0 * delta_p]
    roots = np.roots(coeffs)
    return min((r.real for r in roots if abs(r.imag) < 1e-6), key=abs)
