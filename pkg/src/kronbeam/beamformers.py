"""Joint combiner / precoder / IRS phase designers.

Three designers share the output type :class:`BeamformingSolution`:

* :func:`baseline_full` -- dominant singular pairs of the full channels.
* :func:`kf_design` -- the same recipe applied independently to the
  horizontal and vertical channel factors, glued with Kronecker products.
* :func:`tot_design` -- rank-one HOSVD of the per-domain combined channel
  tensors.

Designers never rescale their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import combined_channel
from .tensor import fold_to_tensor, hosvd_rank_one, rank_one_svd

BASELINE = "baseline"
KF = "kf"
TOT = "tot"
METHODS = (BASELINE, KF, TOT)


@dataclass(frozen=True)
class BeamformingSolution:
    """Combiner ``w`` (K), precoder ``q`` (M) and unit-modulus IRS phases ``theta`` (N).

    KF and TOT also keep their per-domain factors, with
    ``w == kron(w_y, w_z)`` and likewise for ``q`` and ``theta``.
    """

    w: np.ndarray
    q: np.ndarray
    theta: np.ndarray
    method: str
    w_y: np.ndarray | None = None
    w_z: np.ndarray | None = None
    q_y: np.ndarray | None = None
    q_z: np.ndarray | None = None
    theta_y: np.ndarray | None = None
    theta_z: np.ndarray | None = None

    @property
    def factored(self) -> bool:
        return self.w_y is not None


def project_unit_modulus(v) -> np.ndarray:
    """``exp(-1j * angle(v))`` elementwise; zero entries map to 1."""
    v = np.asarray(v, dtype=complex)
    mag = np.abs(v)
    out = np.ones_like(v)
    nz = mag > 0
    out[nz] = np.conj(v[nz]) / mag[nz]
    return out


def _phase_align(v_g, u_h) -> np.ndarray:
    # theta maximizing |v_g^H diag(theta) u_h|
    return project_unit_modulus(np.conj(v_g) * u_h)


def _check_nonzero(**mats):
    for name, A in mats.items():
        if not np.any(A):
            raise ValueError(f"channel {name} is identically zero")


def baseline_full(H, G) -> BeamformingSolution:
    """Full-channel SVD design for ``H`` (N x M) and ``G`` (K x N).

    ``w`` and ``q`` are the dominant left singular vector of ``G`` and the
    dominant right singular vector of ``H``; the IRS phases co-phase the
    dominant right vector of ``G`` with the dominant left vector of ``H``.
    """
    H = np.asarray(H, dtype=complex)
    G = np.asarray(G, dtype=complex)
    if H.ndim != 2 or G.ndim != 2 or G.shape[1] != H.shape[0]:
        raise ValueError(f"need H (N x M) and G (K x N), got {H.shape} and {G.shape}")
    _check_nonzero(H=H, G=G)
    h = rank_one_svd(H)
    g = rank_one_svd(G)
    return BeamformingSolution(w=g.u, q=h.v, theta=_phase_align(g.v, h.u), method=BASELINE)


def kf_design(H_y, H_z, G_y, G_z) -> BeamformingSolution:
    """Kronecker-factorized design from the four per-domain channel factors.

    ``H_t`` is (N_t x M_t) and ``G_t`` is (K_t x N_t) for ``t`` in y, z.
    """
    H_y, H_z, G_y, G_z = (np.asarray(A, dtype=complex) for A in (H_y, H_z, G_y, G_z))
    for t, H_t, G_t in (("y", H_y, G_y), ("z", H_z, G_z)):
        if H_t.ndim != 2 or G_t.ndim != 2 or G_t.shape[1] != H_t.shape[0]:
            raise ValueError(
                f"{t}-domain factors not conformable: H_{t} {H_t.shape}, G_{t} {G_t.shape}"
            )
    _check_nonzero(H_y=H_y, H_z=H_z, G_y=G_y, G_z=G_z)
    hy, hz, gy, gz = (rank_one_svd(A) for A in (H_y, H_z, G_y, G_z))
    theta_y = _phase_align(gy.v, hy.u)
    theta_z = _phase_align(gz.v, hz.u)
    return BeamformingSolution(
        w=np.kron(gy.u, gz.u),
        q=np.kron(hy.v, hz.v),
        theta=np.kron(theta_y, theta_z),
        method=KF,
        w_y=gy.u,
        w_z=gz.u,
        q_y=hy.v,
        q_z=hz.v,
        theta_y=theta_y,
        theta_z=theta_z,
    )


def tot_design(F_y_tensor, F_z_tensor) -> BeamformingSolution:
    """Rank-one HOSVD design from the per-domain combined channel tensors.

    Each tensor is (K_t x M_t x N_t) with ``T[k, m, n] = G_t[k, n] H_t[n, m]``.
    Its mode-1, mode-2 and mode-3 dominant vectors give the combiner, the
    conjugate precoder and the conjugate IRS phase pattern of that domain.
    """
    per_domain = []
    for name, T in (("y", F_y_tensor), ("z", F_z_tensor)):
        T = np.asarray(T, dtype=complex)
        if T.ndim != 3:
            raise ValueError(f"F_{name} must be a third-order tensor, got shape {T.shape}")
        if not np.any(T):
            raise ValueError(f"combined channel tensor F_{name} is identically zero")
        per_domain.append(hosvd_rank_one(T))
    (w_y, qc_y, t_y), (w_z, qc_z, t_z) = per_domain
    q_y, q_z = qc_y.conj(), qc_z.conj()
    theta_y, theta_z = project_unit_modulus(t_y), project_unit_modulus(t_z)
    return BeamformingSolution(
        w=np.kron(w_y, w_z),
        q=np.kron(q_y, q_z),
        theta=np.kron(theta_y, theta_z),
        method=TOT,
        w_y=w_y,
        w_z=w_z,
        q_y=q_y,
        q_z=q_z,
        theta_y=theta_y,
        theta_z=theta_z,
    )


def domain_tensor(H_t, G_t) -> np.ndarray:
    """Fold ``khatri_rao(H_t.T, G_t)`` into its (K_t x M_t x N_t) tensor."""
    H_t = np.asarray(H_t)
    G_t = np.asarray(G_t)
    return fold_to_tensor(combined_channel(H_t, G_t), G_t.shape[0], H_t.shape[1], H_t.shape[0])


def tot_from_factors(H_y, H_z, G_y, G_z) -> BeamformingSolution:
    """TOT design fed with per-domain channel factors (perfect CSI)."""
    return tot_design(domain_tensor(H_y, G_y), domain_tensor(H_z, G_z))
