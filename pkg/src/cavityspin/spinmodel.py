"""Effective spin model on the array, resolved into excitation sectors.

The photon-eliminated Hamiltonian conserves the number of raised spins, so
everything here works inside a :class:`~cavityspin.basis.SectorBasis`.  Its
two pieces:

* a uniform diagonal ``(omega_at/2 + [lambda_a + lambda_b]) * (2 n_exc - N)``
  coming from the splitting plus (optionally) the static coupling shift;
* an excitation-hopping interaction moving one raised spin between two sites
  that share a row (amplitude ``2 lambda_a``) or a column (``2 lambda_b``).

Ground energies per sector give level crossings (superradiant steps), and
ground vectors give two-point spin correlations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .basis import SectorBasis
from .geometry import ArrayGeometry
from .linalg import (
    SparseOperator,
    SpectrumResult,
    ground_state,
    identity_operator,
    operator_from_entries,
)
from .params import SpinCouplings

BISECTION_TOL = 1e-10


def build_spin_interaction(
    geometry: ArrayGeometry, couplings: SpinCouplings, basis: SectorBasis
) -> SparseOperator:
    """Excitation-hopping matrix of the sector (no diagonal part).

    Off-diagonal element between configurations differing by one excitation
    moved within a row is ``2 lambda_a``; within a column ``2 lambda_b``.
    """
    if basis.geometry != geometry:
        raise ValueError("basis geometry mismatch")
    states = basis.states
    dim = basis.dim
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    amp = {"row": 2.0 * couplings.lambda_a, "col": 2.0 * couplings.lambda_b}
    for s, t, kind in geometry.line_pairs():
        a = amp[kind]
        if a == 0.0:
            continue
        bit_s = (states >> s) & 1
        bit_t = (states >> t) & 1
        sel = np.nonzero(bit_s != bit_t)[0]
        if len(sel) == 0:
            continue
        flip = np.int64((1 << s) | (1 << t))
        partners = states[sel] ^ flip
        pidx = basis.bulk_rank(partners)
        rows.append(sel)
        cols.append(pidx)
        vals.append(np.full(len(sel), a))
    if not rows:
        return operator_from_entries(dim, [], [], [])
    return operator_from_entries(
        dim, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    )


def add_diagonal(
    geometry: ArrayGeometry,
    couplings: SpinCouplings,
    basis: SectorBasis,
    include_lambda_shift: bool,
) -> SparseOperator:
    """Uniform sector diagonal from the (optionally shifted) spin splitting."""
    coeff = couplings.omega_at / 2.0
    if include_lambda_shift:
        coeff += couplings.lambda_a + couplings.lambda_b
    value = coeff * (2 * basis.n_exc - geometry.n_sites)
    return identity_operator(basis.dim, value)


def build_sector_hamiltonian(
    geometry: ArrayGeometry,
    couplings: SpinCouplings,
    basis: SectorBasis,
    include_lambda_shift: bool = True,
) -> SparseOperator:
    return build_spin_interaction(geometry, couplings, basis) + add_diagonal(
        geometry, couplings, basis, include_lambda_shift
    )


def hop_count(geometry: ArrayGeometry, mask: int) -> int:
    """Number of allowed single-excitation moves out of a configuration."""
    total = 0
    for row in range(geometry.ly):
        occ = sum((mask >> s) & 1 for s in geometry.row_sites(row))
        total += occ * (geometry.lx - occ)
    for col in range(geometry.lx):
        occ = sum((mask >> s) & 1 for s in geometry.col_sites(col))
        total += occ * (geometry.ly - occ)
    return total


def sector_ground(
    geometry: ArrayGeometry,
    couplings: SpinCouplings,
    n_exc: int,
    *,
    include_lambda_shift: bool = True,
    k: int = 1,
    **solver_kwargs,
) -> tuple[SpectrumResult, SectorBasis]:
    basis = SectorBasis(geometry, n_exc)
    h = build_sector_hamiltonian(geometry, couplings, basis, include_lambda_shift)
    return ground_state(h, min(k, basis.dim), **solver_kwargs), basis


def sector_ground_energy(
    geometry: ArrayGeometry,
    couplings: SpinCouplings,
    n_exc: int,
    include_lambda_shift: bool = True,
) -> float:
    spec, _ = sector_ground(
        geometry, couplings, n_exc, include_lambda_shift=include_lambda_shift
    )
    return spec.ground_energy


@dataclass(frozen=True)
class TransitionPoint:
    """Coupling at which the sector ground energies n -> n+1 cross."""

    n_from: int
    n_to: int
    lambda_c: float


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def transition_couplings(
    geometry: ArrayGeometry,
    omega_at: float,
    *,
    lambda_min: float,
    lambda_max: float,
    include_lambda_shift: bool = True,
    max_transitions: Optional[int] = None,
    tol: float = BISECTION_TOL,
) -> list[TransitionPoint]:
    """Sector crossings n -> n+1 located by bisection inside a bracket.

    Both bracket ends must carry the same coupling sign (the hop ground
    energy is only piecewise linear across zero).  Sectors are scanned in
    increasing n until no crossing falls inside the bracket.
    """
    if lambda_min >= lambda_max:
        raise ValueError("need lambda_min < lambda_max")
    if lambda_min < 0.0 < lambda_max:
        raise ValueError("bracket must not straddle lambda = 0")
    n_sites = geometry.n_sites
    cap = n_sites if max_transitions is None else min(max_transitions, n_sites)

    cache: dict[tuple[int, float], float] = {}

    def energy(n: int, lam: float) -> float:
        key = (n, lam)
        if key not in cache:
            c = SpinCouplings(lambda_a=lam, lambda_b=lam, omega_at=omega_at)
            cache[key] = sector_ground_energy(geometry, c, n, include_lambda_shift)
        return cache[key]

    out: list[TransitionPoint] = []
    for n in range(cap):
        f = lambda lam: energy(n, lam) - energy(n + 1, lam)  # noqa: E731
        flo, fhi = f(lambda_min), f(lambda_max)
        if flo == 0.0 or fhi == 0.0 or flo * fhi < 0.0:
            lam_c = _bisect(f, lambda_min, lambda_max, tol)
            out.append(TransitionPoint(n_from=n, n_to=n + 1, lambda_c=lam_c))
        elif out:
            break  # past the last crossing inside the bracket
    return out


def excitation_curve(
    geometry: ArrayGeometry,
    omega_at: float,
    lambdas: Sequence[float],
    include_lambda_shift: bool = True,
) -> list[tuple[float, int, float]]:
    """Ground-state excitation number along a coupling sweep.

    Returns ``(lambda, n_exc, energy)`` rows; ties resolve to the smaller
    sector.
    """
    rows = []
    for lam in lambdas:
        c = SpinCouplings(lambda_a=lam, lambda_b=lam, omega_at=omega_at)
        best_n, best_e = 0, np.inf
        for n in range(geometry.n_sites + 1):
            e = sector_ground_energy(geometry, c, n, include_lambda_shift)
            if e < best_e - 1e-14 * max(1.0, abs(e)):
                best_n, best_e = n, e
        rows.append((float(lam), best_n, float(best_e)))
    return rows


def pair_correlations(vectors: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Matrix ``C[s, t] = <sigma^+_s sigma^-_t>`` averaged over given vectors.

    ``vectors`` holds an orthonormal (near-)degenerate multiplet as columns;
    the average is the normalized projector trace, so the result does not
    depend on the basis chosen inside the multiplet.  Diagonal entries are
    site occupations.
    """
    n_sites = basis.geometry.n_sites
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    d = vectors.shape[1]
    occ = basis.occupations().astype(float)
    c = np.zeros((n_sites, n_sites))
    weights = (vectors**2).sum(axis=1) / d
    c[np.arange(n_sites), np.arange(n_sites)] = occ.T @ weights
    states = basis.states
    for s in range(n_sites):
        for t in range(n_sites):
            if s == t:
                continue
            bit_s = (states >> s) & 1
            bit_t = (states >> t) & 1
            sel = np.nonzero((bit_t == 1) & (bit_s == 0))[0]
            if len(sel) == 0:
                continue
            flip = np.int64((1 << s) | (1 << t))
            pidx = basis.bulk_rank(states[sel] ^ flip)
            c[s, t] = float(
                np.sum(vectors[pidx, :] * vectors[sel, :]) / d
            )
    return c


@dataclass(frozen=True)
class CorrelationResult:
    """Row/column-partner vs unshared-pair correlation averages."""

    sigma_nn: float
    sigma_nnn: float
    ratio: Optional[float]
    defined: bool
    multiplet_size: int = 1
    cluster_truncated: bool = False


def correlation_ratio(
    spectrum: SpectrumResult, basis: SectorBasis
) -> CorrelationResult:
    """Average NNN/NN correlation ratio of the ground multiplet.

    NN pairs share a row or column (the pairs the interaction couples);
    NNN pairs share neither.  In a fixed sector single-spin coherences
    vanish, so raw and connected correlators coincide.  Undefined for the
    empty and the fully excited sector.
    """
    geometry = basis.geometry
    n = geometry.n_sites
    if basis.n_exc in (0, n):
        return CorrelationResult(
            sigma_nn=0.0, sigma_nnn=0.0, ratio=None, defined=False
        )
    multiplet = spectrum.ground_multiplet()
    c = pair_correlations(multiplet, basis)
    nn = geometry.nn_pairs()
    nnn = geometry.nnn_pairs()
    sigma_nn = float(np.mean([c[s, t] for s, t in nn]))
    if nnn:
        sigma_nnn = float(np.mean([c[s, t] for s, t in nnn]))
    else:
        sigma_nnn = 0.0
    ratio = sigma_nnn / sigma_nn if sigma_nn != 0.0 else None
    return CorrelationResult(
        sigma_nn=sigma_nn,
        sigma_nnn=sigma_nnn,
        ratio=ratio,
        defined=ratio is not None,
        multiplet_size=multiplet.shape[1],
        cluster_truncated=spectrum.ground_cluster_truncated and spectrum.eigenvectors.shape[1] < basis.dim,
    )


def site_occupations(vectors: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Per-site excitation probability of a state or averaged multiplet."""
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    weights = (vectors**2).sum(axis=1) / vectors.shape[1]
    return basis.occupations().astype(float).T @ weights


def sigma_z_expectations(vectors: np.ndarray, basis: SectorBasis) -> np.ndarray:
    return 2.0 * site_occupations(vectors, basis) - 1.0


def one_exc_closed_spectrum(
    geometry: ArrayGeometry, couplings: SpinCouplings
) -> list[tuple[float, int]]:
    """Exact one-excitation interaction spectrum with multiplicities.

    The hop matrix factorizes into (all-ones minus identity) blocks along
    rows and columns, whose eigenvalues are -1 (L-1 fold) and L-1 (simple);
    the sector spectrum is the multiplicity-weighted sum of the two tables.
    """
    la, lb = couplings.lambda_a, couplings.lambda_b
    lx, ly = geometry.lx, geometry.ly
    table_a = [(-1.0, lx - 1), (float(lx - 1), 1)] if lx > 1 else [(0.0, 1)]
    table_b = [(-1.0, ly - 1), (float(ly - 1), 1)] if ly > 1 else [(0.0, 1)]
    out: dict[float, int] = {}
    for ea, ma in table_a:
        if ma == 0:
            continue
        for eb, mb in table_b:
            if mb == 0:
                continue
            val = 2.0 * la * ea + 2.0 * lb * eb
            out[val] = out.get(val, 0) + ma * mb
    return sorted(out.items())
