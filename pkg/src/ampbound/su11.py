"""SU(1,1) algebra of the two-mode amplifier and explicit state construction.

The pair-creating interaction is generated by

    K_plus = s* e*,   K_minus = s e,   K_zero = (s* s + e e*)/2

which close the su(1,1) algebra ``[K0, K+-] = +-K+-``, ``[K+, K-] = -2 K0``.
The two-mode squeeze unitary ``exp(z* K- - z K+)`` with ``z = r e^{i theta}``
factorizes (Baker-Campbell-Hausdorff for this algebra) into

    exp(-e^{i theta} tanh(r) K+) . exp(-2 ln cosh(r) K0) . exp(e^{-i theta} tanh(r) K-)

and a subsequent mode rotation contributes only diagonal phases
``exp(-i (delta_s n_s + delta_e n_e))``.  Applying the factorized operator to
a number state ``|m_s, m_e>`` gives a double sum over the lowering power j
and the raising power l with amplitude

    exp(i gamma(j,l)) cosh(r)^{2j - (m_s+m_e+1)} tanh(r)^{j+l} M(j,l)

on ``|m_s - j + l, m_e - j + l>``, where

    gamma(j,l) = (delta_s + delta_e - theta)(j - l) + pi l
                 - (delta_s m_s + delta_e m_e)
    M(j,l) = sqrt(m_s! m_e! (m_s-j+l)! (m_e-j+l)!) / (j! l! (m_s-j)! (m_e-j)!)

Factorials enter only through log-gamma and each amplitude is assembled as
log-modulus plus phase, so ladder indices in the hundreds are safe.

Starting the system mode in the vacuum (``m_s = 0``) collapses the j sum and
leaves the single-ladder state with coefficients
``tanh(r)^l e^{i(alpha l - delta_e m_e)} / cosh(r)^{m_e+1} sqrt(C(m_e+l, l))``
on ``|l, m_e + l>``, with ``alpha = theta + pi - delta_e - delta_s``.  Mixing
those states over a Bose-Einstein distribution of ``m_e`` yields the evolved
joint density operator used by :mod:`ampbound.fock_oracle`.

The single-mode realization of the same algebra through ``a^2`` and
``a*^2`` (one oscillator, quadratic generators) exists because su(1,1) and
sp(2,R) are isomorphic; it is out of scope here since the bound needs the
genuine two-mode structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .fock_oracle import (
    DensityMatrix,
    JointBlocks,
    TruncationError,
    TruncationSpec,
    thermal_tail,
)

__all__ = [
    "SqueezeParams",
    "BCHFactors",
    "TwoModeKet",
    "bch_factors",
    "evolve_basis_state",
    "build_joint_blocks",
    "build_joint_density",
    "k_plus_matrix",
    "k_minus_matrix",
    "k_zero_matrix",
    "squeeze_generator",
    "rotation_phases",
    "basis_index",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SqueezeParams:
    """Squeeze amplitude plus the three phases of the evolved state.

    ``theta`` is the squeeze phase (the pump phase advanced by pi/2),
    ``delta_s`` and ``delta_e`` are the accumulated mode rotations.  Phases
    are reduced to [0, 2pi).  ``alpha`` is the relative phase that enters the
    joint-state coefficients.
    """

    r: float
    theta: float = 0.0
    delta_s: float = 0.0
    delta_e: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("squeeze amplitude r must be nonnegative")
        object.__setattr__(self, "theta", self.theta % TWO_PI)
        object.__setattr__(self, "delta_s", self.delta_s % TWO_PI)
        object.__setattr__(self, "delta_e", self.delta_e % TWO_PI)

    @property
    def alpha(self) -> float:
        return (self.theta + np.pi - self.delta_e - self.delta_s) % TWO_PI


@dataclass(frozen=True)
class BCHFactors:
    """Exponent coefficients of the factorized squeeze operator.

    ``exp(plus_coeff K+) . exp(zero_coeff K0) . exp(minus_coeff K-)`` equals
    ``exp(z* K- - z K+)``; the raising/lowering coefficients have modulus
    ``tanh r < 1``.
    """

    plus_coeff: complex
    zero_coeff: float
    minus_coeff: complex


def bch_factors(p: SqueezeParams) -> BCHFactors:
    """Coefficients of the factorized squeeze operator for ``z = r e^{i theta}``."""
    t = np.tanh(p.r)
    phase = np.exp(1j * p.theta)
    return BCHFactors(
        plus_coeff=-phase * t,
        zero_coeff=-2.0 * np.log(np.cosh(p.r)),
        minus_coeff=np.conj(phase) * t,
    )


@dataclass(frozen=True)
class TwoModeKet:
    """Sparse two-mode state: amplitudes keyed by ``(n_s, n_e)``."""

    amplitudes: dict
    trunc: TruncationSpec
    charge: int = field(init=False)

    def __post_init__(self):
        charges = {ne - ns for (ns, ne) in self.amplitudes}
        if len(charges) != 1:
            raise ValueError(f"state spans several charge sectors: {sorted(charges)}")
        object.__setattr__(self, "charge", charges.pop())

    def norm_sq(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def ladder_vector(self, length: int) -> np.ndarray:
        """Amplitudes ordered by ``n_s`` (one entry per ladder rung)."""
        v = np.zeros(length, dtype=complex)
        for (ns, _), a in self.amplitudes.items():
            if ns < length:
                v[ns] = a
        return v

    def to_dense(self, dim_s: int, dim_e: int) -> np.ndarray:
        """Dense vector on the row-major (n_s, n_e) product basis."""
        v = np.zeros(dim_s * dim_e, dtype=complex)
        for (ns, ne), a in self.amplitudes.items():
            if ns >= dim_s or ne >= dim_e:
                raise ValueError(
                    f"amplitude at ({ns}, {ne}) outside a {dim_s}x{dim_e} basis"
                )
            v[ns * dim_e + ne] = a
        return v


def evolve_basis_state(m_s: int, m_e: int, p: SqueezeParams,
                       trunc: TruncationSpec,
                       tail_tol: float | None = None) -> TwoModeKet:
    """Squeeze-and-rotate a number state ``|m_s, m_e>``.

    Evaluates the factorized-operator double sum with the ladder truncated at
    ``trunc.max_squeeze``.  Under unitary evolution the untruncated state has
    unit norm, so the norm deficit of the result is exactly the dropped tail
    mass; if it exceeds ``tail_tol`` (default ``trunc.tolerance``) a
    :class:`TruncationError` is raised.

    Charge superselection is structural: amplitudes exist only on kets with
    ``n_e - n_s = m_e - m_s``.
    """
    if m_s < 0 or m_e < 0:
        raise ValueError("mode occupations must be nonnegative")
    if tail_tol is None:
        tail_tol = trunc.tolerance
    L = trunc.max_squeeze

    if p.r == 0.0:
        amp = np.exp(-1j * (p.delta_s * m_s + p.delta_e * m_e))
        return TwoModeKet({(m_s, m_e): amp}, trunc)

    log_t = np.log(np.tanh(p.r))
    log_c = np.log(np.cosh(p.r))
    j_max = min(m_s, m_e)
    ell = np.arange(L + 1)
    # amplitude per system level n_s = m_s - j + l, accumulated over j
    acc = np.zeros(m_s + L + 1, dtype=complex)
    for j in range(j_max + 1):
        log_mag = (
            (2 * j - (m_s + m_e + 1)) * log_c
            + (j + ell) * log_t
            + 0.5 * (gammaln(m_s + 1) + gammaln(m_e + 1)
                     + gammaln(m_s - j + ell + 1) + gammaln(m_e - j + ell + 1))
            - gammaln(j + 1) - gammaln(ell + 1)
            - gammaln(m_s - j + 1) - gammaln(m_e - j + 1)
        )
        gamma = (
            (p.delta_s + p.delta_e - p.theta) * (j - ell)
            + np.pi * ell
            - (p.delta_s * m_s + p.delta_e * m_e)
        )
        acc[m_s - j: m_s - j + L + 1] += np.exp(log_mag + 1j * gamma)

    charge = m_e - m_s
    amplitudes = {
        (ns, ns + charge): acc[ns]
        for ns in range(max(0, m_s - j_max), m_s + L + 1)
        if acc[ns] != 0.0
    }
    ket = TwoModeKet(amplitudes, trunc)
    deficit = 1.0 - ket.norm_sq()
    if deficit > tail_tol:
        raise TruncationError(
            f"ladder cutoff {L} leaves tail mass {deficit:.3e} "
            f"above tolerance {tail_tol:.3e} for (m_s={m_s}, m_e={m_e}, r={p.r})"
        )
    return ket


def build_joint_blocks(n_bar: float, p: SqueezeParams,
                       trunc: TruncationSpec) -> JointBlocks:
    """Evolved joint density operator, one dense block per charge sector.

    Mixes the evolved ``m_s = 0`` states over the Bose-Einstein weights of
    the environment's initial occupation.  The total dropped mass (thermal
    tail plus weighted ladder tails) must stay within ``trunc.tolerance``.
    """
    if n_bar < 0:
        raise ValueError("n_bar must be nonnegative")
    M, L = trunc.max_thermal, trunc.max_squeeze
    t_tail = thermal_tail(n_bar, M)
    if t_tail > trunc.tolerance:
        raise TruncationError(
            f"thermal cutoff {M} leaves tail mass {t_tail:.3e} "
            f"above tolerance {trunc.tolerance:.3e} for n_bar={n_bar}"
        )
    m = np.arange(M + 1)
    if n_bar > 0:
        pbar = np.exp(m * (np.log(n_bar) - np.log1p(n_bar)) - np.log1p(n_bar))
    else:
        pbar = np.zeros(M + 1)
        pbar[0] = 1.0

    blocks = []
    ladder_deficit = 0.0
    for mm in range(M + 1):
        ket = evolve_basis_state(0, mm, p, trunc, tail_tol=1.0)
        v = ket.ladder_vector(L + 1)
        ladder_deficit += pbar[mm] * (1.0 - ket.norm_sq())
        blocks.append(pbar[mm] * np.outer(v, v.conj()))
    if t_tail + ladder_deficit > trunc.tolerance:
        raise TruncationError(
            f"total dropped mass {t_tail + ladder_deficit:.3e} above "
            f"tolerance {trunc.tolerance:.3e} (n_bar={n_bar}, r={p.r})"
        )
    return JointBlocks(trunc=trunc, blocks=tuple(blocks))


def build_joint_density(n_bar: float, p: SqueezeParams,
                        trunc: TruncationSpec) -> DensityMatrix:
    """Dense evolved joint density matrix on the full product basis.

    Same construction as :func:`build_joint_blocks`, embedded into the
    row-major ``(n_s, n_e)`` basis.  Fails if the dense dimension exceeds the
    desk-scale cap; use the block form beyond that.
    """
    return build_joint_blocks(n_bar, p, trunc).to_dense()


def basis_index(n_s: int, n_e: int, dim_e: int) -> int:
    """Flat index of ``|n_s, n_e>`` in the row-major product basis."""
    return n_s * dim_e + n_e


def k_plus_matrix(dim_s: int, dim_e: int) -> np.ndarray:
    """Pair-raising generator on the truncated product basis."""
    K = np.zeros((dim_s * dim_e, dim_s * dim_e))
    for ns in range(dim_s - 1):
        for ne in range(dim_e - 1):
            K[basis_index(ns + 1, ne + 1, dim_e), basis_index(ns, ne, dim_e)] = \
                np.sqrt((ns + 1.0) * (ne + 1.0))
    return K


def k_minus_matrix(dim_s: int, dim_e: int) -> np.ndarray:
    """Pair-lowering generator; the adjoint of the raising one."""
    return k_plus_matrix(dim_s, dim_e).T.copy()


def k_zero_matrix(dim_s: int, dim_e: int) -> np.ndarray:
    """Diagonal generator ``(n_s + n_e + 1)/2`` on the product basis."""
    diag = np.array([(ns + ne + 1) / 2.0
                     for ns in range(dim_s) for ne in range(dim_e)])
    return np.diag(diag)


def squeeze_generator(z: complex, dim_s: int, dim_e: int) -> np.ndarray:
    """Anti-Hermitian exponent ``z* K- - z K+`` of the squeeze unitary."""
    kp = k_plus_matrix(dim_s, dim_e)
    return np.conj(z) * kp.T - z * kp


def rotation_phases(delta_s: float, delta_e: float,
                    dim_s: int, dim_e: int) -> np.ndarray:
    """Diagonal of the mode-rotation unitary on the product basis."""
    return np.array([np.exp(-1j * (delta_s * ns + delta_e * ne))
                     for ns in range(dim_s) for ne in range(dim_e)])
