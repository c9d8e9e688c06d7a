"""Doubly periodic immersed surfaces and their discrete geometry.

A surface is a map F(theta, phi) = L (theta, phi)^T + P(theta, phi)
into the ambient chart, with L a constant 4x2 matrix carrying the
winding of the torus and P a smooth doubly periodic 4-vector sampled
on a regular grid (no seam duplication: theta_i = i T_theta / n).

Parametric derivatives use 4th-order periodic central differences on P
plus the exact contribution of the linear part.  All node-level tensors
are cached lazily on :class:`SurfaceGeometry`, so cheap consumers (the
functional, the flow) never pay for curvature or frame assembly.

Frame conventions at a node:

* e1, e2 span the tangent plane, oriented like (theta, phi);
* e3, e4 span the normal plane, completing a positively oriented
  orthonormal 4-frame in the chart;
* x = <J e1, e2>, y = <J e1, e3>, z = <J e1, e4>.  Where sin(alpha)
  exceeds ``frame_tol`` the normal pair is rotated so that z = 0 and
  y = sin(alpha) >= 0 (the adapted gauge); elsewhere the node is
  flagged unadapted and left in the raw gauge.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .ambient import AmbientManifold
from .errors import NotImmersed

__all__ = [
    "ImmersedSurface",
    "AdaptedFrame",
    "SurfaceGeometry",
    "build_adapted_frame",
    "read_surface",
    "write_surface",
    "zbar_graph",
    "holomorphic_graph",
    "perturbed_graph",
    "lagrangian_torus",
    "revolution_torus",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ImmersedSurface:
    """Grid representation of a doubly periodic immersion into R^4."""

    linear_part: np.ndarray  # (4, 2)
    periodic_part: np.ndarray  # (n_theta, n_phi, 4)
    t_theta: float = TWO_PI
    t_phi: float = TWO_PI

    def __post_init__(self):
        L = np.asarray(self.linear_part, dtype=float)
        P = np.asarray(self.periodic_part, dtype=float)
        if L.shape != (4, 2):
            raise ValueError(f"linear part must be 4x2, got {L.shape}")
        if P.ndim != 3 or P.shape[2] != 4:
            raise ValueError(f"periodic part must be (n_theta, n_phi, 4), got {P.shape}")
        if P.shape[0] < 8 or P.shape[1] < 8:
            raise ValueError("need at least 8 nodes per direction")
        if not (np.isfinite(L).all() and np.isfinite(P).all()):
            raise ValueError("surface data contains non-finite entries")
        if not (self.t_theta > 0 and self.t_phi > 0):
            raise ValueError("periods must be positive")
        object.__setattr__(self, "linear_part", L)
        object.__setattr__(self, "periodic_part", P)

    @property
    def n_theta(self) -> int:
        return self.periodic_part.shape[0]

    @property
    def n_phi(self) -> int:
        return self.periodic_part.shape[1]

    @property
    def h_theta(self) -> float:
        return self.t_theta / self.n_theta

    @property
    def h_phi(self) -> float:
        return self.t_phi / self.n_phi

    def grids(self):
        th = np.arange(self.n_theta) * self.h_theta
        ph = np.arange(self.n_phi) * self.h_phi
        return np.meshgrid(th, ph, indexing="ij")

    def positions(self) -> np.ndarray:
        th, ph = self.grids()
        L = self.linear_part
        base = th[..., None] * L[:, 0] + ph[..., None] * L[:, 1]
        return base + self.periodic_part

    def displaced(self, delta: np.ndarray) -> "ImmersedSurface":
        """New surface with the periodic part shifted by a grid field."""
        return ImmersedSurface(
            self.linear_part,
            self.periodic_part + np.asarray(delta, dtype=float),
            self.t_theta,
            self.t_phi,
        )


# -- periodic finite differences --------------------------------------


def periodic_d1(field: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """4th-order periodic central first derivative along a grid axis."""
    fp1 = np.roll(field, -1, axis)
    fm1 = np.roll(field, 1, axis)
    fp2 = np.roll(field, -2, axis)
    fm2 = np.roll(field, 2, axis)
    return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * spacing)


def periodic_d2(field: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """4th-order periodic central second derivative along a grid axis."""
    fp1 = np.roll(field, -1, axis)
    fm1 = np.roll(field, 1, axis)
    fp2 = np.roll(field, -2, axis)
    fm2 = np.roll(field, 2, axis)
    return (-30.0 * field + 16.0 * (fp1 + fm1) - (fp2 + fm2)) / (12.0 * spacing**2)


# -- node-level geometry ----------------------------------------------


@dataclass
class AdaptedFrame:
    """Orthonormal 4-frames with the normal pair in the adapted gauge."""

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    e4: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    adapted: np.ndarray  # bool mask, False where sin(alpha) <= frame_tol
    frame_tol: float


class SurfaceGeometry:
    """Lazy cache of discrete geometric fields of a surface in an ambient.

    Every array is indexed (n_theta, n_phi, ...).  Tangent frame indices
    run over {1, 2} and are stored 0-based; normal indices {3, 4} live
    in axes of length 2 ordered (e3, e4).
    """

    def __init__(self, surface: ImmersedSurface, ambient: AmbientManifold,
                 frame_tol: float = 1e-6):
        self.surface = surface
        self.ambient = ambient
        self.frame_tol = frame_tol

    # ---- parametric derivatives

    @cached_property
    def pos(self):
        return self.surface.positions()

    @cached_property
    def fth(self):
        S = self.surface
        return S.linear_part[:, 0] + periodic_d1(S.periodic_part, 0, S.h_theta)

    @cached_property
    def fph(self):
        S = self.surface
        return S.linear_part[:, 1] + periodic_d1(S.periodic_part, 1, S.h_phi)

    @cached_property
    def fderiv(self):
        """First derivatives stacked: index i in {theta, phi} first."""
        return np.stack([self.fth, self.fph], axis=-2)  # (nt, np, 2, 4)

    @cached_property
    def fsecond(self):
        """Second parametric derivatives, symmetric 2x2 block of 4-vectors."""
        S = self.surface
        P = S.periodic_part
        dtt = periodic_d2(P, 0, S.h_theta)
        dpp = periodic_d2(P, 1, S.h_phi)
        dtp = periodic_d1(periodic_d1(P, 0, S.h_theta), 1, S.h_phi)
        out = np.empty(P.shape[:2] + (2, 2, 4))
        out[..., 0, 0, :] = dtt
        out[..., 0, 1, :] = dtp
        out[..., 1, 0, :] = dtp
        out[..., 1, 1, :] = dpp
        return out

    # ---- ambient fields along the surface

    @cached_property
    def amb_g(self):
        return self.ambient.metric_at(self.pos)

    @cached_property
    def amb_j(self):
        return self.ambient.j_at(self.pos)

    @cached_property
    def gamma(self):
        return self.ambient.christoffel_at(self.pos)

    @cached_property
    def nabla_j_tensor(self):
        return self.ambient.nabla_j_tensor_at(self.pos)

    # ---- induced metric and area

    def dot(self, u, v):
        """Ambient inner product of chart vector fields on the grid."""
        if self._euclid_dot:
            return np.sum(np.asarray(u) * np.asarray(v), axis=-1)
        return np.einsum("...ab,...a,...b->...", self.amb_g, u, v)

    @cached_property
    def _euclid_dot(self):
        if not self.ambient.flat_metric:
            return False
        g0 = self.ambient.metric_at(np.zeros(4))
        return bool(np.array_equal(g0, np.eye(4)))

    @cached_property
    def induced_metric(self):
        F = self.fderiv
        if self._euclid_dot:
            return np.einsum("...ia,...ja->...ij", F, F)
        return np.einsum("...ab,...ia,...jb->...ij", self.amb_g, F, F)

    @cached_property
    def det_induced(self):
        gi = self.induced_metric
        det = gi[..., 0, 0] * gi[..., 1, 1] - gi[..., 0, 1] ** 2
        if np.any(det <= 1e-14):
            bad = int(np.sum(det <= 1e-14))
            raise NotImmersed(f"induced metric singular at {bad} nodes")
        return det

    @cached_property
    def sqrt_det(self):
        return np.sqrt(self.det_induced)

    @cached_property
    def induced_metric_inv(self):
        gi = self.induced_metric
        det = self.det_induced
        inv = np.empty_like(gi)
        inv[..., 0, 0] = gi[..., 1, 1]
        inv[..., 1, 1] = gi[..., 0, 0]
        inv[..., 0, 1] = -gi[..., 0, 1]
        inv[..., 1, 0] = -gi[..., 1, 0]
        return inv / det[..., None, None]

    def integrate(self, field):
        """Quadrature of a node field against the induced area element."""
        S = self.surface
        return float(np.sum(field * self.sqrt_det) * S.h_theta * S.h_phi)

    @property
    def area_weights(self):
        S = self.surface
        return self.sqrt_det * (S.h_theta * S.h_phi)

    # ---- Kahler angle

    @cached_property
    def cos_alpha(self):
        """cos(alpha) = omega(F_theta, F_phi) / sqrt(det g_ij)."""
        jfth = np.einsum("...ab,...b->...a", self.amb_j, self.fth)
        omega = self.dot(jfth, self.fph)
        return omega / self.sqrt_det

    @cached_property
    def sin_alpha(self):
        return np.sqrt(np.clip(1.0 - self.cos_alpha**2, 0.0, None))

    # ---- tangent frame

    @cached_property
    def _tangent_frame(self):
        g = self.amb_g
        fth, fph = self.fth, self.fph
        n1 = np.sqrt(self.dot(fth, fth))
        e1 = fth / n1[..., None]
        proj = self.dot(fph, e1)
        u = fph - proj[..., None] * e1
        n2 = np.sqrt(self.dot(u, u))
        e2 = u / n2[..., None]
        coeff = np.zeros(fth.shape[:2] + (2, 2))
        coeff[..., 0, 0] = 1.0 / n1
        coeff[..., 0, 1] = -proj / (n1 * n2)
        coeff[..., 1, 1] = 1.0 / n2
        return e1, e2, coeff

    @property
    def e1(self):
        return self._tangent_frame[0]

    @property
    def e2(self):
        return self._tangent_frame[1]

    @cached_property
    def frame_coeff(self):
        """coeff[..., i, a]: e_a = sum_i coeff[i, a] d_i F (tangent only)."""
        return self._tangent_frame[2]

    @cached_property
    def normal_projector(self):
        """P^A_B projecting chart vectors g-orthogonally onto the normal plane."""
        e1, e2 = self.e1, self.e2
        g = self.amb_g
        P = np.broadcast_to(np.eye(4), e1.shape[:2] + (4, 4)).copy()
        for e in (e1, e2):
            ge = e if self._euclid_dot else np.einsum("...ab,...b->...a", g, e)
            P -= e[..., :, None] * ge[..., None, :]
        return P

    def project_normal(self, v):
        return np.einsum("...ab,...b->...a", self.normal_projector, v)

    # ---- adapted normal frame

    @cached_property
    def _normal_frame(self):
        """Raw orthonormal normal pair (n1, n2), positively oriented."""
        g = self.amb_g
        P = self.normal_projector
        cand = np.einsum("...ab,cb->...ca", P, np.eye(4))  # (nt, np, 4 cands, 4)
        norms = np.einsum("...ab,...ca,...cb->...c", g, cand, cand)
        first = np.argmax(norms, axis=-1)
        n1 = np.take_along_axis(cand, first[..., None, None], axis=-2)[..., 0, :]
        n1 = n1 / np.sqrt(self.dot(n1, n1))[..., None]
        gn1 = np.einsum("...ab,...b->...a", g, n1)
        cand2 = cand - np.einsum("...ca,...a->...c", cand, gn1)[..., None] * n1[..., None, :]
        norms2 = np.einsum("...ab,...ca,...cb->...c", g, cand2, cand2)
        np.put_along_axis(norms2, first[..., None], -1.0, axis=-1)
        second = np.argmax(norms2, axis=-1)
        n2 = np.take_along_axis(cand2, second[..., None, None], axis=-2)[..., 0, :]
        n2 = n2 / np.sqrt(self.dot(n2, n2))[..., None]
        # fix chart orientation of the full 4-frame by flipping n2
        frame = np.stack([self.e1, self.e2, n1, n2], axis=-1)
        sign = np.sign(np.linalg.det(frame))
        n2 = n2 * sign[..., None]
        return n1, n2

    @cached_property
    def adapted_frame(self) -> AdaptedFrame:
        e1, e2 = self.e1, self.e2
        n1, n2 = self._normal_frame
        je1 = np.einsum("...ab,...b->...a", self.amb_j, e1)
        v1 = self.dot(je1, n1)
        v2 = self.dot(je1, n2)
        r = np.hypot(v1, v2)
        ok = r > self.frame_tol
        c = np.where(ok, v1 / np.where(ok, r, 1.0), 1.0)
        s = np.where(ok, v2 / np.where(ok, r, 1.0), 0.0)
        e3 = c[..., None] * n1 + s[..., None] * n2
        e4 = -s[..., None] * n1 + c[..., None] * n2
        x = self.dot(je1, e2)
        y = self.dot(je1, e3)
        z = self.dot(je1, e4)
        return AdaptedFrame(e1, e2, e3, e4, x, y, z, ok, self.frame_tol)

    @cached_property
    def frame_matrix(self):
        """All four frame fields stacked: frame[..., a, :] = e_{a+1}."""
        fr = self.adapted_frame
        return np.stack([fr.e1, fr.e2, fr.e3, fr.e4], axis=-2)

    # ---- second fundamental form and mean curvature

    @cached_property
    def accel(self):
        """W_ij = second derivatives plus ambient Christoffel correction."""
        W = self.fsecond.copy()
        if not self.ambient.flat_metric:
            F = self.fderiv
            W = W + np.einsum("...abc,...ib,...jc->...ija", self.gamma, F, F)
        return W

    @cached_property
    def second_fundamental(self):
        """h[..., n, a, b] = <bar nabla_{e_a} e_b, e_{n+3}> in the frame."""
        fr = self.adapted_frame
        normals = np.stack([fr.e3, fr.e4], axis=-2)
        wn = np.einsum("...cd,...ijc,...nd->...nij", self.amb_g, self.accel, normals)
        C = self.frame_coeff
        h = np.einsum("...ia,...jb,...nij->...nab", C, C, wn)
        # contraction order breaks the symmetry at roundoff level; restore it
        return 0.5 * (h + np.swapaxes(h, -1, -2))

    @cached_property
    def mean_curvature_frame(self):
        h = self.second_fundamental
        return h[..., 0, 0] + h[..., 1, 1]  # (nt, np, 2)

    @cached_property
    def mean_curvature(self):
        """Mean curvature vector in chart components (gauge independent)."""
        raw = np.einsum("...ij,...ija->...a", self.induced_metric_inv, self.accel)
        return self.project_normal(raw)

    # ---- derivatives of the angle

    @cached_property
    def dcos_param(self):
        """Parametric partials of the cos(alpha) grid field, index i first."""
        S = self.surface
        ca = self.cos_alpha
        return np.stack(
            [periodic_d1(ca, 0, S.h_theta), periodic_d1(ca, 1, S.h_phi)], axis=-1
        )

    @cached_property
    def grad_cos_frame(self):
        """Frame components (e1, e2) of the surface gradient of cos(alpha)."""
        return np.einsum("...ia,...i->...a", self.frame_coeff, self.dcos_param)

    @cached_property
    def grad_cos_chart(self):
        """Surface gradient of cos(alpha) as an ambient chart vector."""
        up = np.einsum("...ij,...j->...i", self.induced_metric_inv, self.dcos_param)
        return np.einsum("...i,...ia->...a", up, self.fderiv)

    def frame_directional(self, field, a):
        """Directional derivative of a scalar grid field along e_{a+1}."""
        S = self.surface
        d = np.stack(
            [periodic_d1(field, 0, S.h_theta), periodic_d1(field, 1, S.h_phi)],
            axis=-1,
        )
        return np.einsum("...i,...i->...", self.frame_coeff[..., :, a], d)

    def covariant_frame_derivative(self, vfield, a):
        """Ambient covariant derivative of a chart vector field along e_{a+1}."""
        S = self.surface
        d = (
            self.frame_coeff[..., 0, a, None] * periodic_d1(vfield, 0, S.h_theta)
            + self.frame_coeff[..., 1, a, None] * periodic_d1(vfield, 1, S.h_phi)
        )
        if not self.ambient.flat_metric:
            ea = (
                self.frame_coeff[..., 0, a, None] * self.fth
                + self.frame_coeff[..., 1, a, None] * self.fph
            )
            d = d + np.einsum("...abc,...b,...c->...a", self.gamma, ea, vfield)
        return d

    def laplace_beltrami(self, field):
        """Divergence-form Laplace-Beltrami of a scalar grid field."""
        S = self.surface
        d0 = periodic_d1(field, 0, S.h_theta)
        d1 = periodic_d1(field, 1, S.h_phi)
        ginv = self.induced_metric_inv
        w = self.sqrt_det
        q0 = w * (ginv[..., 0, 0] * d0 + ginv[..., 0, 1] * d1)
        q1 = w * (ginv[..., 1, 0] * d0 + ginv[..., 1, 1] * d1)
        div = periodic_d1(q0, 0, S.h_theta) + periodic_d1(q1, 1, S.h_phi)
        return div / w

    # ---- frame components of ambient tensors

    @cached_property
    def nabla_j_frame(self):
        """J_{ab,k} = <(nabla_{e_k} J) e_a, e_b>, shape (..., k, a, b).

        k runs over the two tangent directions; a, b over the full frame.
        """
        fr = self.frame_matrix  # (..., 4 frame, 4 chart)
        tang = fr[..., :2, :]
        S = self.nabla_j_tensor
        dj = np.einsum("...kc,...cab->...kab", tang, S)
        return np.einsum("...kab,...mb,...ad,...nd->...kmn", dj, fr,
                         self.amb_g, fr)

    @cached_property
    def curvature_frame_components(self):
        """(K_1213, K_1224) contracted from the ambient curvature tensor."""
        if self.ambient.flat_metric:
            zero = np.zeros(self.cos_alpha.shape)
            return zero, zero.copy()
        K = self.ambient.curvature_at(self.pos)
        fr = self.adapted_frame
        k1213 = np.einsum("...abcd,...a,...b,...c,...d->...",
                          K, fr.e1, fr.e2, fr.e1, fr.e3)
        k1224 = np.einsum("...abcd,...a,...b,...c,...d->...",
                          K, fr.e1, fr.e2, fr.e2, fr.e4)
        return k1213, k1224

    # ---- assembled second-order frame quantities

    @cached_property
    def mean_curvature_normal_derivative(self):
        """H^n_{,a} = <bar nabla_{e_a} H, e_{n+3}>, shape (..., a, n)."""
        H = self.mean_curvature
        fr = self.adapted_frame
        normals = np.stack([fr.e3, fr.e4], axis=-2)
        cols = []
        for a in range(2):
            dH = self.covariant_frame_derivative(H, a)
            cols.append(np.einsum("...cd,...c,...nd->...n", self.amb_g, dH, normals))
        return np.stack(cols, axis=-2)

    @cached_property
    def tangent_connection(self):
        """theta_a = <bar nabla_{e_a} e1, e2> for a in {1, 2}."""
        out = []
        for a in range(2):
            de1 = self.covariant_frame_derivative(self.e1, a)
            out.append(self.dot(de1, self.e2))
        return np.stack(out, axis=-1)

    @cached_property
    def j12_kk(self):
        """Trace of the surface second covariant derivative of J_{12,.}.

        Assembled by differencing the J_{12,k} grid fields along the
        tangent frame and removing the frame-connection terms, so the
        result matches the value taken in a frame that is covariantly
        constant at the node.  Identically zero for a parallel J.
        """
        if self.ambient.constant_j and self.ambient.flat_metric:
            return np.zeros(self.cos_alpha.shape)
        jf = self.nabla_j_frame  # (..., k, a, b)
        phi = jf[..., :, 0, 1]  # J_{12,k}, (..., k)
        # e_k(phi_k)
        total = (
            self.frame_directional(phi[..., 0], 0)
            + self.frame_directional(phi[..., 1], 1)
        )
        # tangential part of nabla_{e_k} e_k: <nabla_{e_k} e_k, e_l> phi_l
        theta = self.tangent_connection
        # <nabla_{e1} e1, e2> = theta_1, <nabla_{e2} e2, e1> = -<nabla_{e2} e1, e2>
        total -= theta[..., 0] * phi[..., 1]
        total -= -theta[..., 1] * phi[..., 0]
        # derivative of the frame legs inside J_{12,k}:
        # omega_{k;1b} J_{b2,k} + omega_{k;2b} J_{1b,k}, b normal -> h terms
        h = self.second_fundamental  # (..., n, a, b)
        for k in range(2):
            for n in range(2):
                total -= h[..., n, k, 0] * jf[..., k, n + 2, 1]
                total -= h[..., n, k, 1] * jf[..., k, 0, n + 2]
        return total

    # ---- convenience

    @cached_property
    def min_cos_alpha(self):
        return float(np.min(self.cos_alpha))


def build_adapted_frame(surface: ImmersedSurface, ambient: AmbientManifold,
                        frame_tol: float = 1e-6) -> AdaptedFrame:
    """Adapted orthonormal frames at every grid node of a surface."""
    return SurfaceGeometry(surface, ambient, frame_tol=frame_tol).adapted_frame


# -- generators --------------------------------------------------------


def _empty_periodic(n_theta, n_phi):
    return np.zeros((n_theta, n_phi, 4))


def zbar_graph(c: float, n_theta: int = 64, n_phi: int = 64) -> ImmersedSurface:
    """Graph of z -> c * conj(z) over the square torus.

    The Kahler angle is constant: cos(alpha) = (1 - c^2) / (1 + c^2).
    c = 0 is the flat complex line.
    """
    L = np.array([[1.0, 0.0], [0.0, 1.0], [c, 0.0], [0.0, -c]])
    return ImmersedSurface(L, _empty_periodic(n_theta, n_phi))


def holomorphic_graph(a: complex, b: complex = 0.0, n_theta: int = 64,
                      n_phi: int = 64) -> ImmersedSurface:
    """Affine complex graph z -> a z + b, holomorphic so cos(alpha) = 1."""
    a = complex(a)
    L = np.array(
        [
            [1.0, 0.0],
            [0.0, 1.0],
            [a.real, -a.imag],
            [a.imag, a.real],
        ]
    )
    P = _empty_periodic(n_theta, n_phi)
    b = complex(b)
    P[..., 2] += b.real
    P[..., 3] += b.imag
    return ImmersedSurface(L, P)


def _low_mode_bump(base: ImmersedSurface, eps: float,
                   modes: Sequence[int]) -> ImmersedSurface:
    th, ph = base.grids()
    k1, k2 = int(modes[0]), int(modes[1])
    P = base.periodic_part.copy()
    P[..., 0] += 0.2 * eps * np.sin(k2 * ph)
    P[..., 1] += 0.2 * eps * np.cos(k1 * th)
    P[..., 2] += eps * (np.sin(k1 * th) * np.cos(k2 * ph) + 0.3 * np.cos(k2 * ph))
    P[..., 3] += eps * (np.cos(k1 * th) * np.sin(k2 * ph) + 0.3 * np.sin(k1 * th))
    return ImmersedSurface(base.linear_part, P, base.t_theta, base.t_phi)


def perturbed_graph(
    c: float,
    eps: float,
    modes: Sequence[int] = (1, 1),
    n_theta: int = 64,
    n_phi: int = 64,
) -> ImmersedSurface:
    """zbar_graph(c) plus a smooth low-mode periodic perturbation."""
    return _low_mode_bump(zbar_graph(c, n_theta, n_phi), eps, modes)


def perturbed_holomorphic_graph(
    a: complex = 0.3,
    b: complex = 0.0,
    eps: float = 0.05,
    modes: Sequence[int] = (1, 1),
    n_theta: int = 64,
    n_phi: int = 64,
) -> ImmersedSurface:
    """holomorphic_graph(a, b) plus the same low-mode perturbation."""
    return _low_mode_bump(holomorphic_graph(a, b, n_theta, n_phi), eps, modes)


def lagrangian_torus(r1: float = 1.0, r2: float = 1.0, n_theta: int = 64,
                     n_phi: int = 64) -> ImmersedSurface:
    """Product of two circles; cos(alpha) vanishes identically."""
    P = _empty_periodic(n_theta, n_phi)
    th = np.arange(n_theta) * (TWO_PI / n_theta)
    ph = np.arange(n_phi) * (TWO_PI / n_phi)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    P[..., 0] = r1 * np.cos(TH)
    P[..., 1] = r1 * np.sin(TH)
    P[..., 2] = r2 * np.cos(PH)
    P[..., 3] = r2 * np.sin(PH)
    return ImmersedSurface(np.zeros((4, 2)), P)


def revolution_torus(big: float = 2.0, small: float = 0.5, n_theta: int = 64,
                     n_phi: int = 64) -> ImmersedSurface:
    """Torus of revolution inside the x4 = 0 hyperplane."""
    P = _empty_periodic(n_theta, n_phi)
    th = np.arange(n_theta) * (TWO_PI / n_theta)
    ph = np.arange(n_phi) * (TWO_PI / n_phi)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    ring = big + small * np.cos(PH)
    P[..., 0] = ring * np.cos(TH)
    P[..., 1] = ring * np.sin(TH)
    P[..., 2] = small * np.sin(PH)
    return ImmersedSurface(np.zeros((4, 2)), P)


# -- plain text serialization -----------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_surface(surface: ImmersedSurface, path) -> None:
    """Serialize a surface grid; 17 significant digits, row-major theta."""
    lines = [
        f"surf {surface.n_theta} {surface.n_phi} "
        f"{_fmt(surface.t_theta)} {_fmt(surface.t_phi)}",
        "linear " + " ".join(_fmt(v) for v in surface.linear_part.ravel()),
    ]
    flat = surface.periodic_part.reshape(-1, 4)
    for row in flat:
        lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_surface(path) -> ImmersedSurface:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("surf "):
        raise ValueError(f"{path}: missing surf header")
    head = lines[0].split()
    if len(head) != 5:
        raise ValueError(f"{path}: malformed surf header")
    n_theta, n_phi = int(head[1]), int(head[2])
    t_theta, t_phi = float(head[3]), float(head[4])
    if len(lines) < 2 or not lines[1].startswith("linear "):
        raise ValueError(f"{path}: missing linear row")
    lvals = [float(v) for v in lines[1].split()[1:]]
    if len(lvals) != 8:
        raise ValueError(f"{path}: linear row needs 8 values")
    L = np.array(lvals).reshape(4, 2)
    body = lines[2:]
    if len(body) != n_theta * n_phi:
        raise ValueError(
            f"{path}: expected {n_theta * n_phi} node rows, got {len(body)}"
        )
    P = np.array([[float(v) for v in ln.split()] for ln in body])
    if P.shape[1] != 4:
        raise ValueError(f"{path}: node rows need 4 values")
    return ImmersedSurface(L, P.reshape(n_theta, n_phi, 4), t_theta, t_phi)
