"""Static lattice model: two p-wave superconducting chains bridged by a defect site.

Everything here lives in the single-particle Bogoliubov--de Gennes (Nambu)
representation.  The Nambu basis ordering is

    (c_0, ..., c_{M-1}, c_0^dag, ..., c_{M-1}^dag)

with the many-body Hamiltonian H = (1/2) Psi^dag H_BdG Psi + const.  Site
indexing is fixed throughout the package: chain-1 sites 0..N1-1 (left to
right), the defect at index N1, chain-2 sites N1+1..M-1 (left to right),
M = N1 + 1 + N2.

The particle-hole operation is Xi = (swap particle/hole blocks) followed by
complex conjugation; every static Hamiltonian built here satisfies
Xi H Xi = -H, and Majorana modes are unit-norm fixed points of Xi.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

__all__ = [
    "ChainParams",
    "GaussianPerturbation",
    "SystemSpec",
    "MajoranaMode",
    "phs_conjugate",
    "build_static_bdg",
    "extract_majorana_modes",
    "nambu_overlap",
    "bulk_gap",
]

#: declared zero-mode tolerance for N = 100, mu/t = 0.2; splitting scales as
#: exp(-N/xi) with xi ~ 1/|ln(mu/2t)| for other parameters.
ZERO_MODE_TOL = 1e-8


@dataclass(frozen=True)
class ChainParams:
    """Parameters of one uniform p-wave superconducting chain.

    Parameters
    ----------
    n_sites : int
        Number of lattice sites N (>= 2).
    mu : float
        Chemical potential.
    hopping : float
        Nearest-neighbour hopping amplitude t.
    pairing : float
        Superconducting pairing amplitude Delta.
    """

    n_sites: int
    mu: float
    hopping: float
    pairing: float

    def __post_init__(self) -> None:
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")

    @property
    def topological(self) -> bool:
        """True iff the chain is in the topological regime |mu| < 2t."""
        return abs(self.mu) < 2.0 * abs(self.hopping)


@dataclass(frozen=True)
class GaussianPerturbation:
    """Gaussian on-site potential bump V_s * exp(sign * (n - n0)^2 / (2 s0^2)).

    ``exponent_sign = -1`` (the default) is the physical decaying bump; the
    positive sign is exposed only as a documented configuration escape hatch.
    The bump is added to the on-site energy of site ``n`` counted within each
    chain (applied to both chains).
    """

    amplitude: float
    center: float
    width: float
    exponent_sign: int = -1

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError(f"perturbation width must be > 0, got {self.width}")
        if self.exponent_sign not in (-1, 1):
            raise ValueError("exponent_sign must be -1 or +1")

    def profile(self, n_sites: int) -> np.ndarray:
        """On-site energy shift for sites 0..n_sites-1 of one chain."""
        n = np.arange(n_sites, dtype=float)
        return self.amplitude * np.exp(
            self.exponent_sign * (n - self.center) ** 2 / (2.0 * self.width**2)
        )


@dataclass(frozen=True)
class SystemSpec:
    """Two chains + one defect site at energy ``defect_energy`` (> 0)."""

    chain1: ChainParams
    chain2: ChainParams
    defect_energy: float
    perturbation: Optional[GaussianPerturbation] = None

    def __post_init__(self) -> None:
        if self.defect_energy <= 0:
            raise ValueError(
                f"defect_energy must be > 0, got {self.defect_energy}"
            )

    @property
    def n_sites(self) -> int:
        """Total site count M = N1 + 1 + N2."""
        return self.chain1.n_sites + 1 + self.chain2.n_sites

    @property
    def defect_site(self) -> int:
        return self.chain1.n_sites

    def without_perturbation(self) -> "SystemSpec":
        return replace(self, perturbation=None)


@dataclass(frozen=True)
class MajoranaMode:
    """A Majorana mode as a unit-norm, Xi-invariant Nambu vector.

    ``label`` is one of gamma1L, gamma1R, gamma2L, gamma2R; ``energy`` is the
    residual eigenvalue of the near-zero doublet the mode was built from.
    """

    vector: np.ndarray
    label: str
    energy: float


def phs_conjugate(vec_or_mat: np.ndarray) -> np.ndarray:
    """Apply the antiunitary particle-hole operation Xi.

    For a vector: swap the particle and hole halves, then conjugate.  For a
    matrix H this returns Xi H Xi (so PHS of a Hamiltonian reads
    ``phs_conjugate(H) == -H``).
    """
    a = np.asarray(vec_or_mat)
    m = a.shape[0] // 2
    if a.ndim == 1:
        return np.concatenate([a[m:], a[:m]]).conj()
    swapped = np.block(
        [[a[m:, m:], a[m:, :m]], [a[:m, m:], a[:m, :m]]]
    )
    return swapped.conj()


def _chain_blocks(p: ChainParams, onsite_shift: np.ndarray | None = None):
    """Particle block A and pairing block B of one isolated chain."""
    n = p.n_sites
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    diag = np.full(n, -p.mu)
    if onsite_shift is not None:
        diag = diag + onsite_shift
    np.fill_diagonal(a, diag)
    for i in range(n - 1):
        a[i + 1, i] = -p.hopping
        a[i, i + 1] = -p.hopping
        b[i + 1, i] = p.pairing
        b[i, i + 1] = -p.pairing
    return a, b


def _bdg_from_blocks(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.block([[a, b], [-b.conj(), -a.T]])


def build_static_bdg(spec: SystemSpec) -> np.ndarray:
    """Assemble the 2M x 2M static BdG matrix of the full system.

    The defect row/column carries only its on-site energy (the defect is
    initially decoupled from both chains); coupling enters exclusively
    through the time-dependent drive.
    """
    m = spec.n_sites
    d = spec.defect_site
    shift1 = shift2 = None
    if spec.perturbation is not None and spec.perturbation.amplitude != 0.0:
        shift1 = spec.perturbation.profile(spec.chain1.n_sites)
        shift2 = spec.perturbation.profile(spec.chain2.n_sites)
    a = np.zeros((m, m))
    b = np.zeros((m, m))
    a1, b1 = _chain_blocks(spec.chain1, shift1)
    a2, b2 = _chain_blocks(spec.chain2, shift2)
    a[:d, :d] = a1
    b[:d, :d] = b1
    a[d, d] = spec.defect_energy
    a[d + 1 :, d + 1 :] = a2
    b[d + 1 :, d + 1 :] = b2
    return _bdg_from_blocks(a, b)


def nambu_overlap(a, b) -> complex:
    """Complex inner product <a, b> of two Nambu vectors (or modes)."""
    va = a.vector if isinstance(a, MajoranaMode) else np.asarray(a)
    vb = b.vector if isinstance(b, MajoranaMode) else np.asarray(b)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return complex(np.vdot(va, vb))


def bulk_gap(spec: SystemSpec) -> float:
    """Smallest |E| over all bulk (non-Majorana, non-defect) eigenvalues."""
    if spec.perturbation is not None and spec.perturbation.amplitude != 0.0:
        raise ValueError("bulk_gap is defined for uniform (unperturbed) chains")
    energies = []
    for chain in (spec.chain1, spec.chain2):
        h = _bdg_from_blocks(*_chain_blocks(chain))
        e = np.linalg.eigvalsh(h)
        e = np.sort(np.abs(e))
        # drop the near-zero doublet (two Majorana combinations per chain)
        energies.append(e[2] if chain.topological else e[0])
    return float(min(energies))


def _majorana_pair_of_chain(h_chain: np.ndarray, n: int):
    """Two orthonormal Xi-invariant vectors spanning the near-zero doublet.

    Returns (left, right, energies).  At large N the doublet is numerically
    degenerate, so eigh returns an arbitrary mixture; we therefore build
    Xi-invariant combinations from the full 2-dimensional subspace and then
    localise by diagonalising the right-half weight operator restricted to
    it (a real orthogonal rotation, which preserves Xi-invariance).
    """
    evals, evecs = np.linalg.eigh(h_chain)
    order = np.argsort(np.abs(evals))
    doublet, bulk_first = order[:2], order[2]
    splitting = float(max(abs(evals[doublet[0]]), abs(evals[doublet[1]])))
    gap = abs(evals[bulk_first])
    if gap < 100.0 * splitting:
        raise ValueError(
            "near-zero doublet is not separated from the bulk: "
            f"splitting {splitting:.3e}, first bulk level {gap:.3e}"
        )
    candidates = []
    for k in doublet:
        v = evecs[:, k].astype(complex)
        for comb in (v + phs_conjugate(v), 1j * (v - phs_conjugate(v))):
            nrm = np.linalg.norm(comb)
            if nrm > 1e-6:
                candidates.append(comb / nrm)
    basis = []
    for vec in candidates:
        for prev in basis:
            vec = vec - prev * np.vdot(prev, vec)
        nrm = np.linalg.norm(vec)
        if nrm > 1e-6:
            basis.append(vec / nrm)
        if len(basis) == 2:
            break
    if len(basis) != 2:
        raise ValueError("failed to construct two Majorana combinations")
    va, vb = basis
    # right-half weight operator in the {va, vb} basis (real symmetric,
    # because cross weights of Xi-invariant vectors come in conjugate pairs)
    w = np.zeros(2 * n)
    w[n // 2 : n] = 1.0
    w[n + n // 2 :] = 1.0
    wab = np.array(
        [
            [np.sum(w * np.abs(va) ** 2), np.real(np.sum(w * va.conj() * vb))],
            [np.real(np.sum(w * vb.conj() * va)), np.sum(w * np.abs(vb) ** 2)],
        ]
    )
    _, rot = np.linalg.eigh(wab)
    left = rot[0, 0] * va + rot[1, 0] * vb
    right = rot[0, 1] * va + rot[1, 1] * vb
    return left, right, evals[doublet]


def _fix_sign(vec: np.ndarray, m: int) -> np.ndarray:
    """Fix the residual +- sign of a Xi-invariant vector.

    Convention: the largest-magnitude particle-block component has positive
    real part; if that component is (numerically) purely imaginary, positive
    imaginary part instead.
    """
    i = int(np.argmax(np.abs(vec[:m])))
    z = vec[i]
    s = np.sign(z.real) if abs(z.real) > 1e-9 * abs(z) else np.sign(z.imag)
    return vec * s if s != 0 else vec


def extract_majorana_modes(h: np.ndarray, spec: SystemSpec) -> dict[str, MajoranaMode]:
    """Locate the four Majorana modes of the two decoupled chains.

    Each chain block of ``h`` is diagonalised independently; the near-zero
    doublet is rotated into Xi-invariant, spatially localised combinations.
    Returns ``{"gamma1L", "gamma1R", "gamma2L", "gamma2R"}``.  The modes have
    exactly zero weight on the defect site by construction.
    """
    if not (spec.chain1.topological and spec.chain2.topological):
        raise ValueError("both chains must be in the topological regime")
    m = spec.n_sites
    d = spec.defect_site
    out: dict[str, MajoranaMode] = {}
    layout = [
        ("gamma1", 0, spec.chain1.n_sites),
        ("gamma2", d + 1, spec.chain2.n_sites),
    ]
    for prefix, offset, n in layout:
        idx = np.r_[offset : offset + n, m + offset : m + offset + n]
        h_chain = h[np.ix_(idx, idx)]
        left, right, energies = _majorana_pair_of_chain(h_chain, n)
        for tag, v2n, energy in (
            ("L", left, energies[0]),
            ("R", right, energies[1]),
        ):
            full = np.zeros(2 * m, dtype=complex)
            full[offset : offset + n] = v2n[:n]
            full[m + offset : m + offset + n] = v2n[n:]
            full = _fix_sign(full, m)
            out[prefix + tag] = MajoranaMode(
                vector=full, label=prefix + tag, energy=float(energy)
            )
    return out
