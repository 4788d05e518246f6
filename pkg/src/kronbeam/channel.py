"""Geometric URA channels, combined Khatri-Rao channels and their factorizations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .tensor import khatri_rao, rank_one_svd, rank_one_svd_batch


class ArrayGeometry(NamedTuple):
    """Half-wavelength URA with ``n_y`` horizontal and ``n_z`` vertical elements."""

    n_y: int
    n_z: int

    @property
    def total(self) -> int:
        return self.n_y * self.n_z


class SpatialFrequencies(NamedTuple):
    mu: float
    psi: float


@dataclass(frozen=True)
class PathParams:
    gain: complex
    elev_dep: float
    az_dep: float
    elev_arr: float
    az_arr: float


@dataclass(frozen=True)
class GeometricChannel:
    """Multipath channel with its per-path and approximate Kronecker factors.

    ``full`` is the (n_rx x n_tx) channel matrix, ``per_path_y/z`` the
    horizontal and vertical factors of every path (the path gain sits in
    the horizontal factor), and ``approx_y/approx_z`` the single Kronecker
    pair obtained by summing the horizontal factors and averaging the
    vertical ones.
    """

    full: np.ndarray
    per_path_y: tuple[np.ndarray, ...]
    per_path_z: tuple[np.ndarray, ...]
    approx_y: np.ndarray
    approx_z: np.ndarray
    paths: tuple[PathParams, ...] = ()

    @property
    def approx(self) -> np.ndarray:
        return np.kron(self.approx_y, self.approx_z)

    def kron_error(self) -> float:
        """Relative Frobenius error of the single Kronecker approximation."""
        return float(np.linalg.norm(self.full - self.approx) / np.linalg.norm(self.full))


def spatial_frequencies(elev: float, az: float) -> SpatialFrequencies:
    """Azimuthal and elevation spatial frequencies for angles in radians."""
    return SpatialFrequencies(np.pi * np.sin(elev) * np.sin(az), np.pi * np.cos(elev))


def steering_vector(sf: SpatialFrequencies, geom: ArrayGeometry):
    """Return ``(full, y, z)`` with ``full = kron(y, z)``.

    Element ``m = m_y * n_z + m_z`` of ``full`` is
    ``exp(-1j * (m_y * mu + m_z * psi))``.
    """
    y = np.exp(-1j * np.arange(geom.n_y) * sf.mu)
    z = np.exp(-1j * np.arange(geom.n_z) * sf.psi)
    return np.kron(y, z), y, z


def cn_gain(mean: complex = 0.0, var: float = 1.0) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Circularly-symmetric complex Gaussian gain law CN(mean, var)."""
    if var < 0:
        raise ValueError(f"gain variance must be nonnegative, got {var}")

    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        re_im = rng.standard_normal((size, 2))
        return mean + np.sqrt(var / 2) * (re_im[:, 0] + 1j * re_im[:, 1])

    return draw


def draw_paths(
    L: int,
    elev_spread_deg: float,
    az_lo: float,
    az_hi: float,
    rng: np.random.Generator,
    gain_law: Callable[[np.random.Generator, int], np.ndarray] | None = None,
) -> list[PathParams]:
    """Draw ``L`` independent paths.

    Elevations (departure and arrival) are uniform on
    ``[90 - spread, 90 + spread]`` degrees, azimuths uniform on
    ``[az_lo, az_hi]`` degrees, gains from ``gain_law`` (CN(0, 1) default).
    Returned angles are in radians.
    """
    if L < 1:
        raise ValueError(f"need at least one path, got L={L}")
    if elev_spread_deg < 0 or elev_spread_deg > 90:
        raise ValueError(f"elevation spread must lie in [0, 90] degrees, got {elev_spread_deg}")
    if az_lo > az_hi:
        raise ValueError(f"empty azimuth range [{az_lo}, {az_hi}]")
    gain_law = gain_law or cn_gain()
    elev = np.deg2rad(90.0 + rng.uniform(-elev_spread_deg, elev_spread_deg, size=(L, 2)))
    az = np.deg2rad(rng.uniform(az_lo, az_hi, size=(L, 2)))
    gains = gain_law(rng, L)
    return [
        PathParams(complex(gains[l]), elev[l, 0], az[l, 0], elev[l, 1], az[l, 1])
        for l in range(L)
    ]


def synth_channel(
    paths: Sequence[PathParams], tx_geom: ArrayGeometry, rx_geom: ArrayGeometry
) -> GeometricChannel:
    """Build the (rx x tx) multipath channel and its Kronecker factors."""
    if not paths:
        raise ValueError("synth_channel needs at least one path")
    per_y, per_z = [], []
    for p in paths:
        _, tx_y, tx_z = steering_vector(spatial_frequencies(p.elev_dep, p.az_dep), tx_geom)
        _, rx_y, rx_z = steering_vector(spatial_frequencies(p.elev_arr, p.az_arr), rx_geom)
        per_y.append(p.gain * np.outer(rx_y, tx_y))
        per_z.append(np.outer(rx_z, tx_z))
    full = sum(np.kron(a, b) for a, b in zip(per_y, per_z))
    approx_y = sum(per_y)
    approx_z = sum(per_z) / len(per_z)
    return GeometricChannel(full, tuple(per_y), tuple(per_z), approx_y, approx_z, tuple(paths))


def combined_channel(H, G) -> np.ndarray:
    """``khatri_rao(H.T, G)``: column n is ``kron(H[n, :], G[:, n])``.

    With this layout ``w^H G diag(theta) H q == (q^T kron w^H) F theta``.
    """
    H = np.asarray(H)
    G = np.asarray(G)
    if H.ndim != 2 or G.ndim != 2 or H.shape[0] != G.shape[1]:
        raise ValueError(
            f"combined channel needs H (N x M) and G (K x N), got {H.shape} and {G.shape}"
        )
    return khatri_rao(H.T, G)


def add_estimation_noise(F, sigma_z_sq: float, rng: np.random.Generator) -> np.ndarray:
    """Add i.i.d. CN(0, sigma_z_sq) entries to ``F``."""
    if sigma_z_sq < 0:
        raise ValueError(f"noise variance must be nonnegative, got {sigma_z_sq}")
    F = np.asarray(F, dtype=complex)
    if sigma_z_sq == 0:
        return F.copy()
    Z = rng.standard_normal(F.shape) + 1j * rng.standard_normal(F.shape)
    return F + np.sqrt(sigma_z_sq / 2) * Z


def lskrf(F_hat, K: int, M: int):
    """Least-squares Khatri-Rao factorization of a (K*M) x N matrix.

    Every column is reshaped to a K x M matrix (entry ``(k, m)`` from row
    ``m*K + k``) and replaced by its best rank-one approximation. Columns of
    ``G_hat`` are unit-norm with the phase convention of
    :func:`~kronbeam.tensor.rank_one_svd`; magnitude and phase go to the rows
    of ``H_hat``. No attempt is made to resolve the per-column scaling.

    Returns
    -------
    H_hat : ndarray, shape (N, M)
    G_hat : ndarray, shape (K, N)
    """
    F_hat = np.asarray(F_hat, dtype=complex)
    if F_hat.ndim != 2 or F_hat.shape[0] != K * M:
        raise ValueError(f"lskrf expects {K * M} rows, got shape {F_hat.shape}")
    N = F_hat.shape[1]
    blocks = F_hat.T.reshape(N, M, K).transpose(0, 2, 1)  # (N, K, M)
    sigma, u, v, _ = rank_one_svd_batch(blocks)
    G_hat = u.T
    H_hat = sigma[:, None] * v.conj()
    return H_hat, G_hat


def _rearrange(A, top_dims, bot_dims) -> np.ndarray:
    r1, c1 = top_dims
    r2, c2 = bot_dims
    # A[i*r2 + p, j*c2 + q] -> R[i + j*r1, p + q*r2]
    blocks = A.reshape(r1, r2, c1, c2)
    return blocks.transpose(2, 0, 3, 1).reshape(r1 * c1, r2 * c2)


def nearest_kron_factor(A, top_dims, bot_dims):
    """Factors ``(A_y, A_z)`` minimizing ``||A - kron(A_y, A_z)||_F``.

    The blocks of ``A`` are vectorized into the rows of a rearranged matrix
    whose best rank-one approximation gives ``vec(A_y)`` and ``vec(A_z)``.
    The singular value is split evenly between the two factors.
    """
    A = np.asarray(A, dtype=complex)
    r1, c1 = top_dims
    r2, c2 = bot_dims
    if A.ndim != 2 or A.shape != (r1 * r2, c1 * c2):
        raise ValueError(
            f"cannot split {A.shape} matrix into Kronecker factors {tuple(top_dims)} x {tuple(bot_dims)}"
        )
    res = rank_one_svd(_rearrange(A, top_dims, bot_dims))
    scale = np.sqrt(res.sigma)
    A_y = (scale * res.u).reshape(r1, c1, order="F")
    A_z = (scale * res.v.conj()).reshape(r2, c2, order="F")
    return A_y, A_z


class DomainDims(NamedTuple):
    """Per-domain sizes of the BS (M), UE (K) and IRS (N) arrays."""

    m_y: int
    m_z: int
    k_y: int
    k_z: int
    n_y: int
    n_z: int

    @property
    def M(self) -> int:
        return self.m_y * self.m_z

    @property
    def K(self) -> int:
        return self.k_y * self.k_z

    @property
    def N(self) -> int:
        return self.n_y * self.n_z


def domain_row_permutation(dims: DomainDims) -> np.ndarray:
    """Row order taking ``khatri_rao(H.T, G)`` to ``kron(F_y, F_z)``.

    For separable ``H = kron(H_y, H_z)`` and ``G = kron(G_y, G_z)``,
    ``F[perm] == kron(khatri_rao(H_y.T, G_y), khatri_rao(H_z.T, G_z))``.
    Columns need no permutation.
    """
    m_y, m_z, k_y, k_z = dims.m_y, dims.m_z, dims.k_y, dims.k_z
    # position r' in kron(F_y, F_z) indexes (m_y, k_y, m_z, k_z) with k_z fastest
    my, ky, mz, kz = np.meshgrid(
        np.arange(m_y), np.arange(k_y), np.arange(m_z), np.arange(k_z), indexing="ij"
    )
    m = my * m_z + mz
    k = ky * k_z + kz
    return (m * dims.K + k).ravel()


def extract_domain_combined(F_hat, dims: DomainDims):
    """Horizontal and vertical combined channels from a noisy full estimate.

    Returns ``(F_y, F_z)`` of shapes (K_y*M_y, N_y) and (K_z*M_z, N_z), the
    nearest Kronecker pair of the row-permuted estimate. Exact (up to a
    scalar c, 1/c) when the estimate is noiseless and separable.
    """
    F_hat = np.asarray(F_hat, dtype=complex)
    if F_hat.shape != (dims.K * dims.M, dims.N):
        raise ValueError(
            f"combined channel must be {(dims.K * dims.M, dims.N)}, got {F_hat.shape}"
        )
    perm = domain_row_permutation(dims)
    return nearest_kron_factor(
        F_hat[perm],
        (dims.k_y * dims.m_y, dims.n_y),
        (dims.k_z * dims.m_z, dims.n_z),
    )

