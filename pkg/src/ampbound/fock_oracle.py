"""Brute-force truncated-Fock-space engine.

Everything the closed forms in :mod:`ampbound.analytic` claim is re-derived
here by assembling the joint density matrix of the two oscillators on a
truncated number basis and doing plain linear algebra on it: partial traces,
eigendecompositions, occupation and energy expectations, purities.  No
closed-form shortcut enters any of these operations, which is what makes the
module usable as ground truth.

Two representations of the joint state are supported:

* a dense two-mode :class:`DensityMatrix` over the product basis
  ``(n_s, n_e)``, row-major with ``n_e`` fastest.  Dense joints are capped at
  ``DENSE_DIM_CAP`` basis states; this is the desk-scale path used wherever
  it fits and by the fully label-blind partial trace.
* a list of charge-sector blocks (:class:`JointBlocks`).  The pair-creating
  interaction conserves ``n_e - n_s``, so the joint state is block diagonal
  over that label; storing one dense block per sector keeps tight truncation
  tolerances affordable at large squeeze amplitudes.  Reductions from blocks
  still sum literal matrix entries keyed by their basis labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import nbinom

__all__ = [
    "DENSE_DIM_CAP",
    "BLOCK_ENTRY_BUDGET",
    "TruncationError",
    "TruncationInfeasibleError",
    "DensityMatrixError",
    "TruncationSpec",
    "DensityMatrix",
    "JointBlocks",
    "thermal_tail",
    "squeeze_tail",
    "choose_truncation",
    "thermal_density",
    "vacuum_density",
    "partial_trace",
    "von_neumann_entropy",
    "expectations",
    "purity",
    "max_offdiagonal",
    "verify_point",
    "verify_grid",
]

DENSE_DIM_CAP = 4000          # max side of a dense joint matrix
BLOCK_ENTRY_BUDGET = 2 * 10**7  # max total complex entries across blocks

EIGENVALUE_FLOOR = -1e-10     # below this an eigenvalue is a bug, not noise


class TruncationError(RuntimeError):
    """A truncated construction failed to reach the requested tail mass."""


class TruncationInfeasibleError(RuntimeError):
    """The requested tolerance needs more storage than the configured budget."""


class DensityMatrixError(RuntimeError):
    """A matrix violated a density-matrix invariant beyond tolerance."""


@dataclass(frozen=True)
class TruncationSpec:
    """Cutoffs for the joint-state construction.

    ``max_thermal`` bounds the initial thermal occupation sum (index ``m``),
    ``max_squeeze`` bounds the pair ladder (index ``l``), ``tolerance`` is
    the total probability mass the truncation is allowed to drop.  The
    documented tail estimator is::

        (n_bar/(n_bar+1))**(M+1)
          + sum_m pbar_m * NegBin(m+1, 1 - tanh(r)**2).sf(L)  <=  tolerance

    i.e. the exact geometric tail of the thermal sum plus the exact
    negative-binomial ladder tails weighted by the thermal distribution.
    """

    max_thermal: int
    max_squeeze: int
    tolerance: float

    def __post_init__(self):
        if self.max_thermal < 0 or self.max_squeeze < 0:
            raise ValueError("cutoffs must be nonnegative")
        if not 0 < self.tolerance < 1:
            raise ValueError("tolerance must be in (0, 1)")

    @property
    def dense_dim(self) -> int:
        """Side of the dense two-mode matrix implied by these cutoffs."""
        return (self.max_squeeze + 1) * (self.max_thermal + self.max_squeeze + 1)


@dataclass(frozen=True)
class DensityMatrix:
    """Dense Hermitian trace-one operator on an explicit number basis.

    ``basis`` is either a list of ``(n_s, n_e)`` pairs (two-mode) or a list
    of plain occupation numbers (single mode).  Two-mode bases are row-major
    over ``(n_s, n_e)`` with ``n_e`` fastest so that entries are reproducible
    from the coefficient formulas bit for bit.
    """

    dim: int
    entries: np.ndarray
    basis: tuple

    def __post_init__(self):
        if self.entries.shape != (self.dim, self.dim):
            raise DensityMatrixError(
                f"entries shape {self.entries.shape} does not match dim {self.dim}"
            )
        if len(self.basis) != self.dim:
            raise DensityMatrixError("basis length does not match dim")
        herm = np.max(np.abs(self.entries - self.entries.conj().T))
        if herm > 1e-12:
            raise DensityMatrixError(f"matrix not Hermitian: max deviation {herm:.3e}")

    @property
    def is_two_mode(self) -> bool:
        return isinstance(self.basis[0], tuple)

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))


def product_basis(dim_s: int, dim_e: int) -> tuple:
    """Ordered two-mode basis, row-major over (n_s, n_e), n_e fastest."""
    return tuple((ns, ne) for ns in range(dim_s) for ne in range(dim_e))


def thermal_tail(n_bar: float, max_thermal: int) -> float:
    """Dropped mass of the geometric thermal sum, ``(n/(n+1))**(M+1)``."""
    if n_bar == 0:
        return 0.0
    return float(np.exp((max_thermal + 1) * (np.log(n_bar) - np.log1p(n_bar))))


def squeeze_tail(n_bar: float, r: float, max_thermal: int, max_squeeze: int) -> float:
    """Dropped ladder mass summed over retained thermal sectors.

    The pair ladder of the sector that started with ``m`` thermal quanta is
    negative-binomially distributed with ``m+1`` successes and failure
    probability ``tanh(r)**2``; its exact survival function beyond the cutoff
    is weighted by the thermal probability of the sector.
    """
    if r == 0:
        return 0.0
    t2 = np.tanh(r) ** 2
    m = np.arange(max_thermal + 1)
    if n_bar > 0:
        log_pbar = m * (np.log(n_bar) - np.log1p(n_bar)) - np.log1p(n_bar)
        pbar = np.exp(log_pbar)
    else:
        pbar = np.zeros(max_thermal + 1)
        pbar[0] = 1.0
    tails = nbinom.sf(max_squeeze, m + 1, 1.0 - t2)
    return float(np.sum(pbar * tails))


def choose_truncation(n_bar: float, r: float, tolerance: float,
                      budget: int = BLOCK_ENTRY_BUDGET) -> TruncationSpec:
    """Smallest cutoffs meeting the documented tail estimator.

    The thermal cutoff takes half the tolerance through the exact geometric
    tail; the ladder cutoff takes the other half through the weighted
    negative-binomial tails.  Both cutoffs are nondecreasing as the tolerance
    shrinks.

    Raises
    ------
    TruncationInfeasibleError
        If the resulting block storage exceeds ``budget`` complex entries.
    """
    if not 0 < tolerance < 1:
        raise ValueError("tolerance must be in (0, 1)")
    if n_bar < 0 or r < 0:
        raise ValueError("n_bar and r must be nonnegative")
    half = tolerance / 2.0
    if n_bar == 0:
        M = 0
    else:
        log_q = np.log(n_bar) - np.log1p(n_bar)
        M = max(0, int(np.ceil(np.log(half) / log_q - 1)))
        while thermal_tail(n_bar, M) > half:
            M += 1
    if r == 0:
        L = 0
    else:
        L = 1
        while squeeze_tail(n_bar, r, M, L) > half:
            L *= 2
            if (M + 1) * (L + 1) ** 2 > 64 * budget:
                raise TruncationInfeasibleError(
                    f"no feasible ladder cutoff for n_bar={n_bar}, r={r}, "
                    f"tolerance={tolerance}"
                )
        lo, hi = L // 2, L
        while lo < hi:
            mid = (lo + hi) // 2
            if squeeze_tail(n_bar, r, M, mid) <= half:
                hi = mid
            else:
                lo = mid + 1
        L = lo
    entries = (M + 1) * (L + 1) ** 2
    if entries > budget:
        raise TruncationInfeasibleError(
            f"truncation (M={M}, L={L}) needs {entries} block entries, "
            f"budget is {budget}"
        )
    return TruncationSpec(max_thermal=M, max_squeeze=L, tolerance=tolerance)


@dataclass(frozen=True)
class JointBlocks:
    """Joint state stored as one dense block per charge sector.

    ``blocks[m]`` is the ``(L+1, L+1)`` matrix of the sector with
    ``n_e - n_s = m``; its row ``l`` carries the basis label
    ``(n_s, n_e) = (l, m + l)``.
    """

    trunc: TruncationSpec
    blocks: tuple

    @property
    def dim_s(self) -> int:
        return self.trunc.max_squeeze + 1

    @property
    def dim_e(self) -> int:
        return self.trunc.max_thermal + self.trunc.max_squeeze + 1

    def trace(self) -> float:
        return float(sum(np.real(np.trace(b)) for b in self.blocks))

    def purity(self) -> float:
        """``Tr[rho^2]``; charge blocks never mix, so the square is blockwise."""
        return float(sum(np.sum(np.abs(b) ** 2) for b in self.blocks))

    def reduced_system(self) -> DensityMatrix:
        """Trace out the environment by matching its basis labels.

        The entry ``(l, l')`` of block ``m`` carries environment labels
        ``(m+l, m+l')``; it survives the trace only when those agree.
        """
        rho = np.zeros((self.dim_s, self.dim_s), dtype=complex)
        for b in self.blocks:
            np.fill_diagonal(rho, rho.diagonal() + b.diagonal())
        return DensityMatrix(self.dim_s, rho, tuple(range(self.dim_s)))

    def reduced_environment(self) -> DensityMatrix:
        """Trace out the system; entry ``(l, l')`` survives only at ``l = l'``."""
        rho = np.zeros((self.dim_e, self.dim_e), dtype=complex)
        for m, b in enumerate(self.blocks):
            idx = np.arange(b.shape[0]) + m
            rho[idx, idx] += b.diagonal()
        return DensityMatrix(self.dim_e, rho, tuple(range(self.dim_e)))

    def to_dense(self, cap: int = DENSE_DIM_CAP) -> DensityMatrix:
        """Embed into the full product basis (fails above the dense cap)."""
        dim = self.dim_s * self.dim_e
        if dim > cap:
            raise TruncationInfeasibleError(
                f"dense dimension {dim} exceeds cap {cap}"
            )
        rho = np.zeros((dim, dim), dtype=complex)
        for m, b in enumerate(self.blocks):
            L1 = b.shape[0]
            idx = np.array([l * self.dim_e + (m + l) for l in range(L1)])
            rho[np.ix_(idx, idx)] += b
        return DensityMatrix(dim, rho, product_basis(self.dim_s, self.dim_e))


def thermal_density(n_bar: float, dim: int) -> DensityMatrix:
    """Truncated single-mode Bose-Einstein state, diagonal geometric weights."""
    n = np.arange(dim)
    if n_bar == 0:
        w = np.zeros(dim)
        w[0] = 1.0
    else:
        w = np.exp(n * (np.log(n_bar) - np.log1p(n_bar)) - np.log1p(n_bar))
    return DensityMatrix(dim, np.diag(w.astype(complex)), tuple(range(dim)))


def vacuum_density(dim: int) -> DensityMatrix:
    """Single-mode vacuum projector on a truncated basis."""
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return DensityMatrix(dim, rho, tuple(range(dim)))


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Label-blind partial trace of a dense two-mode matrix.

    Parameters
    ----------
    rho : DensityMatrix
        Two-mode matrix on the row-major ``(n_s, n_e)`` basis.
    keep : {"system", "environment"}

    Returns
    -------
    DensityMatrix
        Single-mode matrix; the trace is preserved exactly by construction.
    """
    if not rho.is_two_mode:
        raise ValueError("partial_trace needs a two-mode matrix")
    if keep not in ("system", "environment"):
        raise ValueError(f"keep must be 'system' or 'environment', got {keep!r}")
    dim_s = rho.basis[-1][0] + 1
    dim_e = rho.basis[-1][1] + 1
    if dim_s * dim_e != rho.dim:
        raise ValueError("basis is not a full rectangular product basis")
    four = rho.entries.reshape(dim_s, dim_e, dim_s, dim_e)
    if keep == "system":
        red = np.einsum("aeue->au", four)
        return DensityMatrix(dim_s, red, tuple(range(dim_s)))
    red = np.einsum("sesf->ef", four)
    return DensityMatrix(dim_e, red, tuple(range(dim_e)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``-sum lambda ln lambda`` over the eigenvalues, in nats.

    Eigenvalues in ``[EIGENVALUE_FLOOR, 0)`` are clamped to zero as
    truncation noise; anything below the floor raises, because a genuinely
    negative eigenvalue signals a construction bug rather than roundoff.
    """
    vals = np.linalg.eigvalsh(rho.entries)
    if vals.min() < EIGENVALUE_FLOOR:
        raise DensityMatrixError(
            f"eigenvalue {vals.min():.3e} below validity floor {EIGENVALUE_FLOOR}"
        )
    vals = np.clip(vals, 0.0, 1.0)
    pos = vals[vals > 0]
    return float(-np.sum(pos * np.log(pos)))


def expectations(rho: DensityMatrix, omega: float) -> tuple[float, float]:
    """Occupation and energy of a single-mode state.

    Returns ``(number, energy)`` with ``number = Tr[N rho]`` and
    ``energy = omega * (number + 1/2)``; the zero-point term cancels in any
    difference of energies.
    """
    if rho.is_two_mode:
        raise ValueError("expectations needs a single-mode matrix")
    if omega <= 0:
        raise ValueError("omega must be positive")
    n = np.asarray(rho.basis, dtype=float)
    number = float(np.real(np.sum(n * np.diag(rho.entries))))
    return number, omega * (number + 0.5)


def purity(rho: DensityMatrix) -> float:
    """``Tr[rho^2]``, evaluated as the squared Frobenius norm."""
    return float(np.sum(np.abs(rho.entries) ** 2))


def max_offdiagonal(rho: DensityMatrix) -> float:
    """Largest off-diagonal modulus, the diagonality figure of merit."""
    off = rho.entries - np.diag(np.diag(rho.entries))
    return float(np.max(np.abs(off))) if rho.dim > 1 else 0.0


def verify_point(n_bar: float, r: float, omega: float = 1.0,
                 tolerance: float = 1e-12,
                 dense_cap: int = DENSE_DIM_CAP) -> dict:
    """Run the full oracle at one ``(n_bar, r)`` point.

    Assembles the evolved joint state, reduces it both ways, and returns a
    record comparing every oracle number against its closed form.  The dense
    product-basis route (with its label-blind partial trace) is used whenever
    the dense dimension fits ``dense_cap``; otherwise the charge-block route
    carries the reduction.

    Record fields: ``n_bar, r, M, L, delta_S_analytic, delta_S_oracle,
    delta_Q_analytic, delta_Q_oracle, delta_N_analytic, delta_N_oracle,
    purity_formula, purity_oracle, max_offdiag, dense_route``.
    """
    from . import analytic, su11

    trunc = choose_truncation(n_bar, r, tolerance)
    params = su11.SqueezeParams(r=r, theta=0.0, delta_s=0.0, delta_e=0.0)
    blocks = su11.build_joint_blocks(n_bar, params, trunc)
    mult = analytic.Multiplicities.from_squeeze(n_bar, r)

    dense_route = trunc.dense_dim <= dense_cap
    if dense_route:
        joint = blocks.to_dense(cap=dense_cap)
        rho_s = partial_trace(joint, "system")
        rho_e = partial_trace(joint, "environment")
        pur = purity(joint)
    else:
        rho_s = blocks.reduced_system()
        rho_e = blocks.reduced_environment()
        pur = blocks.purity()

    rho_s_in = vacuum_density(rho_s.dim)
    rho_e_in = thermal_density(n_bar, rho_e.dim)

    dS_oracle = von_neumann_entropy(rho_s) - von_neumann_entropy(rho_s_in)
    n_fin, e_fin = expectations(rho_e, omega)
    n_in, e_in = expectations(rho_e_in, omega)

    return {
        "n_bar": n_bar,
        "r": r,
        "M": trunc.max_thermal,
        "L": trunc.max_squeeze,
        "delta_S_analytic": analytic.delta_S(mult),
        "delta_S_oracle": dS_oracle,
        "delta_Q_analytic": analytic.delta_Q(omega, mult),
        "delta_Q_oracle": e_fin - e_in,
        "delta_N_analytic": analytic.delta_N(mult),
        "delta_N_oracle": n_fin - n_in,
        "purity_formula": analytic.joint_purity(mult),
        "purity_oracle": pur,
        "max_offdiag": max(max_offdiagonal(rho_s), max_offdiagonal(rho_e)),
        "dense_route": dense_route,
    }


def verify_grid(points: Sequence[tuple[float, float]], tolerance: float = 1e-8,
                omega: float = 1.0, truncation_tolerance: float = 1e-12) -> dict:
    """Sweep the oracle over ``(n_bar, r)`` points and gate the agreement.

    A point passes when the entropy difference is within ``tolerance``
    absolute, heat and particle flows are within ``tolerance`` relative (with
    an absolute floor at the same value for vanishing flows), and both
    reduced matrices are diagonal to 1e-10.  The closed-form purity
    comparison is recorded on every point but never gates; it is known to
    disagree with the assembled state away from the no-amplification limit.
    Infeasible truncations are recorded as errors, not raised.
    """
    records = []
    overall = True
    for n_bar, r in points:
        try:
            rec = verify_point(n_bar, r, omega=omega,
                               tolerance=truncation_tolerance)
        except TruncationInfeasibleError as exc:
            records.append({"n_bar": n_bar, "r": r, "error": str(exc)})
            overall = False
            continue
        q_scale = max(abs(rec["delta_Q_analytic"]), 1.0)
        n_scale = max(abs(rec["delta_N_analytic"]), 1.0)
        rec["pass"] = bool(
            abs(rec["delta_S_analytic"] - rec["delta_S_oracle"]) <= tolerance
            and abs(rec["delta_Q_analytic"] - rec["delta_Q_oracle"]) <= tolerance * q_scale
            and abs(rec["delta_N_analytic"] - rec["delta_N_oracle"]) <= tolerance * n_scale
            and rec["max_offdiag"] < 1e-10
        )
        overall = overall and rec["pass"]
        records.append(rec)
    return {
        "tolerance": tolerance,
        "truncation_tolerance": truncation_tolerance,
        "omega": omega,
        "records": records,
        "pass": overall,
    }
