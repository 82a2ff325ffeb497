"""Pointwise Kähler geometry from a symbolic potential.

A manifold chart is described by a complex dimension ``m``, a potential
expression ``K(z_1..z_m, zb_1..zb_m)`` and a chart domain.  The metric is
``g_{i jbar} = d_i d_jbar K``; all its derivatives are taken symbolically
when the manifold is constructed, so pointwise tensors evaluate near machine
precision.

Conventions (calibrated so that flat potentials give zero curvature, round
Fubini–Study-type potentials give positive holomorphic sectional curvature,
and the Bochner combination of curvature, Ricci and scalar curvature
vanishes on constant-curvature models):

* curvature:  ``R_{i jbar k lbar} = -d_i d_jbar g_{k lbar}
  + g^{p qbar} (d_i g_{k qbar}) (d_jbar g_{p lbar})``
* a real tangent vector is encoded by its complex representative ``v``,
  meaning ``X = sum_i v^i d_{z_i} + conj(v^i) d_{zb_i}``; then ``JX <-> i v``,
  ``g(X,Y) = 2 Re h(v,w)`` and ``g(X,JY) = 2 Im h(v,w)`` with
  ``h(v,w) = g_{i jbar} v^i conj(w^j)``
* real curvature values expand the quadrilinear form through the mixed
  components: ``R(X,Y,Z,U) = sum R_{i jbar k lbar}
  (x^i conj(y^j) - y^i conj(x^j)) (z^k conj(u^l) - u^k conj(z^l))``
* Ricci is the trace of the curvature operator over a real orthonormal
  basis, ``S_{k jbar} = g^{l ibar}-contraction of R``; it coincides with
  ``-d_k d_jbar log det g``
* scalar curvature is the full real trace, ``tau = 2 g^{i jbar} S_{i jbar}``.

All objects are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as ex
from .expr import Expr, Var, Z, ZB

ChartPoint = np.ndarray  # (m,) complex array inside the chart domain


class GeometryError(Exception):
    """Base class for chart-level numerical failures."""


class MetricError(GeometryError):
    """Metric not Hermitian positive definite at the requested point."""


class DomainError(GeometryError):
    """Point outside the chart domain."""


class FrameError(GeometryError):
    """Requested frame does not exist or could not be orthonormalized."""


@dataclass(frozen=True)
class ChartDomain:
    """Ball of given radius or polydisc, centered at the origin."""

    kind: str  # "ball" | "polydisc"
    radii: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in ("ball", "polydisc"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if any(r <= 0 for r in self.radii):
            raise ValueError("domain radii must be positive")

    def contains(self, p: Sequence[complex], margin: float = 0.0) -> bool:
        p = np.asarray(p, dtype=complex)
        if self.kind == "ball":
            return float(np.linalg.norm(p)) <= self.radii[0] * (1.0 - margin) + 1e-12
        return bool(
            np.all(np.abs(p) <= np.array(self.radii) * (1.0 - margin) + 1e-12)
        )

    def sample_point(self, rng: np.random.Generator, dimension: int, margin: float = 0.1) -> ChartPoint:
        """Uniform draw from the domain shrunk by ``margin`` of its radius."""
        if self.kind == "ball":
            direction = rng.normal(size=2 * dimension)
            direction /= np.linalg.norm(direction)
            radius = self.radii[0] * (1.0 - margin) * rng.random() ** (1.0 / (2 * dimension))
            x = direction * radius
            return x[:dimension] + 1j * x[dimension:]
        coords = []
        for r in self.radii:
            rho = r * (1.0 - margin) * math.sqrt(rng.random())
            theta = 2 * math.pi * rng.random()
            coords.append(rho * complex(math.cos(theta), math.sin(theta)))
        return np.array(coords, dtype=complex)


def ball(radius: float) -> ChartDomain:
    return ChartDomain("ball", (float(radius),))


def polydisc(*radii: float) -> ChartDomain:
    return ChartDomain("polydisc", tuple(float(r) for r in radii))


@dataclass(frozen=True, eq=False)
class RealTangentVector:
    """Real tangent vector encoded by its complex representative.

    ``X <-> v`` means ``X = sum v^i d_{z_i} + conj(v^i) d_{zb_i}``; the
    complex structure acts as multiplication by i, so ``J^2 X = -X`` exactly.
    """

    components: np.ndarray  # (m,) complex

    def j(self) -> "RealTangentVector":
        return RealTangentVector(1j * self.components)

    def scaled(self, factor: float) -> "RealTangentVector":
        return RealTangentVector(factor * self.components)


def tangent(components: Sequence[complex]) -> RealTangentVector:
    return RealTangentVector(np.asarray(components, dtype=complex))


@dataclass(frozen=True, eq=False)
class HermitianMetric:
    """Metric matrix ``g_{i jbar}`` and its inverse at one chart point."""

    matrix: np.ndarray
    inverse: np.ndarray

    def hermitian_product(self, v: np.ndarray, w: np.ndarray) -> complex:
        """h(v, w) = g_{i jbar} v^i conj(w^j)."""
        return complex(v @ self.matrix @ np.conj(w))

    def inner(self, x: RealTangentVector, y: RealTangentVector) -> float:
        """g(X, Y) = 2 Re h(v, w)."""
        return 2.0 * self.hermitian_product(x.components, y.components).real

    def inner_j(self, x: RealTangentVector, y: RealTangentVector) -> float:
        """g(X, JY) = 2 Im h(v, w)."""
        return 2.0 * self.hermitian_product(x.components, y.components).imag

    def norm(self, x: RealTangentVector) -> float:
        return math.sqrt(max(self.inner(x, x), 0.0))


@dataclass(frozen=True, eq=False)
class ChristoffelData:
    """Holomorphic Christoffel symbols ``Gamma^k_{ij}``, index order [k,i,j]."""

    gamma: np.ndarray


@dataclass(frozen=True, eq=False)
class ComplexCurvature:
    """Curvature components ``R_{i jbar k lbar}``, index order [i,j,k,l]."""

    tensor: np.ndarray


@dataclass(frozen=True, eq=False)
class RicciData:
    """Ricci matrix ``S_{i jbar}`` plus the real bilinear evaluator."""

    matrix: np.ndarray
    metric: HermitianMetric

    def __call__(self, x: RealTangentVector, y: RealTangentVector) -> float:
        """S(X, Y); symmetric and J-invariant."""
        return 2.0 * complex(x.components @ self.matrix @ np.conj(y.components)).real


class KahlerManifold:
    """Chart of a Kähler manifold defined by a symbolic potential.

    The constructor validates the potential (variable kinds/indices and
    reality on sampled points) and eagerly builds the symbolic derivative
    cache: ``g``, its first derivatives in both kinds, and the mixed second
    derivatives needed for curvature.  Instances are immutable afterwards
    and safe to evaluate concurrently.
    """

    def __init__(
        self,
        dimension: int,
        potential: Expr,
        domain: ChartDomain | None = None,
        name: str = "manifold",
        check_reality: bool = True,
    ):
        if dimension < 1:
            raise ValueError("dimension must be a positive integer")
        self.m = int(dimension)
        self.potential = potential
        self.domain = domain if domain is not None else ball(1.0)
        self.name = name
        ex.validate_variables(potential, self.m, (Z, ZB))
        if check_reality:
            self._check_reality()

        m = self.m
        diff, fold = ex.wirtinger_derivative, ex.constant_fold
        K = fold(potential)
        zs = [Var(Z, i + 1) for i in range(m)]
        zbs = [Var(ZB, j + 1) for j in range(m)]
        dK = [fold(diff(K, zs[i])) for i in range(m)]
        self._g_ast = [[fold(diff(dK[i], zbs[j])) for j in range(m)] for i in range(m)]
        self._dg_ast = [
            [[fold(diff(self._g_ast[i][j], zs[a])) for j in range(m)] for i in range(m)]
            for a in range(m)
        ]
        self._dgb_ast = [
            [[fold(diff(self._g_ast[i][j], zbs[b])) for j in range(m)] for i in range(m)]
            for b in range(m)
        ]
        # d2g[i][j][k][l] = d_{z_i} d_{zb_j} g_{k lbar}
        self._d2g_ast = [
            [
                [[fold(diff(self._dg_ast[i][k][l], zbs[j])) for l in range(m)] for k in range(m)]
                for j in range(m)
            ]
            for i in range(m)
        ]
        comp = ex.compile_evaluator
        self._potential_fn = comp(K)
        self._g_fn = [[comp(a) for a in row] for row in self._g_ast]
        self._dg_fn = [[[comp(a) for a in row] for row in blk] for blk in self._dg_ast]
        self._dgb_fn = [[[comp(a) for a in row] for row in blk] for blk in self._dgb_ast]
        self._d2g_fn = [
            [[[comp(a) for a in row] for row in blk] for blk in blk2] for blk2 in self._d2g_ast
        ]

    def _check_reality(self):
        rng = np.random.default_rng(1811)
        for _ in range(8):
            p = self.domain.sample_point(rng, self.m)
            a = self.assignment(p)
            try:
                value = ex.evaluate(self.potential, a)
            except ex.EvaluationDomainError:
                continue
            if abs(value.imag) > 1e-12 * max(1.0, abs(value)):
                raise ValueError(
                    f"potential is not real on the chart: K({p}) = {value}"
                )

    def assignment(self, p: Sequence[complex]) -> dict[Var, complex]:
        """Evaluation assignment binding zb_k to the conjugate of z_k."""
        a: dict[Var, complex] = {}
        for i, value in enumerate(np.asarray(p, dtype=complex)):
            v = complex(value)
            a[Var(Z, i + 1)] = v
            a[Var(ZB, i + 1)] = v.conjugate()
        return a

    def require_in_domain(self, p: Sequence[complex]) -> ChartPoint:
        p = np.asarray(p, dtype=complex)
        if p.shape != (self.m,):
            raise DomainError(f"point has shape {p.shape}, expected ({self.m},)")
        if not self.domain.contains(p):
            raise DomainError(f"point {p} outside chart domain {self.domain}")
        return p

    def sample_point(self, rng: np.random.Generator, margin: float = 0.1) -> ChartPoint:
        return self.domain.sample_point(rng, self.m, margin)

    # Raw tensor evaluation (no validation); used by metric_at and the
    # finite-difference oracle.
    def metric_matrix(self, p: Sequence[complex]) -> np.ndarray:
        a = self.assignment(p)
        m = self.m
        return np.array([[self._g_fn[i][j](a) for j in range(m)] for i in range(m)])

    def _dg_values(self, a: dict) -> tuple[np.ndarray, np.ndarray]:
        m = self.m
        dg = np.array(
            [[[self._dg_fn[k][i][j](a) for j in range(m)] for i in range(m)] for k in range(m)]
        )
        dgb = np.array(
            [[[self._dgb_fn[k][i][j](a) for j in range(m)] for i in range(m)] for k in range(m)]
        )
        return dg, dgb

    def _d2g_values(self, a: dict) -> np.ndarray:
        m = self.m
        return np.array(
            [
                [[[self._d2g_fn[i][j][k][l](a) for l in range(m)] for k in range(m)] for j in range(m)]
                for i in range(m)
            ]
        )


def metric_at(manifold: KahlerManifold, p: Sequence[complex]) -> HermitianMetric:
    """Hermitian positive-definite metric at ``p``, with inverse."""
    p = manifold.require_in_domain(p)
    g = manifold.metric_matrix(p)
    scale = max(1.0, float(np.max(np.abs(g))))
    if float(np.max(np.abs(g - g.conj().T))) > 1e-12 * scale:
        raise MetricError(f"metric not Hermitian at {p}")
    g = 0.5 * (g + g.conj().T)
    smallest = float(np.linalg.eigvalsh(g)[0])
    if smallest <= 0.0:
        raise MetricError(
            f"metric not positive definite at {p}: smallest eigenvalue {smallest:.6e}"
        )
    inverse = np.linalg.inv(g)
    if float(np.max(np.abs(g @ inverse - np.eye(manifold.m)))) > 1e-10:
        raise MetricError(f"metric inversion failed at {p}")
    return HermitianMetric(matrix=g, inverse=inverse)


def christoffel_at(
    manifold: KahlerManifold,
    p: Sequence[complex],
    metric: HermitianMetric | None = None,
) -> ChristoffelData:
    """``Gamma^k_{ij} = g^{k lbar} d_i g_{j lbar}``, symmetric in (i, j)."""
    p = manifold.require_in_domain(p)
    if metric is None:
        metric = metric_at(manifold, p)
    a = manifold.assignment(p)
    dg, _ = manifold._dg_values(a)
    # dg[i, j, l] = d_i g_{j lbar};  g^{k lbar} = inverse[l, k]
    gamma = np.einsum("lk,ijl->kij", metric.inverse, dg)
    gamma = 0.5 * (gamma + gamma.transpose(0, 2, 1))
    return ChristoffelData(gamma=gamma)


def curvature_at(
    manifold: KahlerManifold,
    p: Sequence[complex],
    metric: HermitianMetric | None = None,
) -> ComplexCurvature:
    """Curvature components ``R_{i jbar k lbar}`` at ``p``.

    Validates the Kähler symmetries (pair symmetry and conjugation symmetry)
    of the result before returning it.
    """
    p = manifold.require_in_domain(p)
    if metric is None:
        metric = metric_at(manifold, p)
    a = manifold.assignment(p)
    dg, dgb = manifold._dg_values(a)
    d2g = manifold._d2g_values(a)
    # R[i,j,k,l] = -d2g[i,j,k,l] + g^{p qbar} dg[i,k,q] dgb[j,p,l]
    r = -d2g + np.einsum("qp,ikq,jpl->ijkl", metric.inverse, dg, dgb)
    scale = max(1.0, float(np.max(np.abs(r))))
    pair = max(
        float(np.max(np.abs(r - r.transpose(2, 1, 0, 3)))),
        float(np.max(np.abs(r - r.transpose(0, 3, 2, 1)))),
    )
    conj = float(np.max(np.abs(r - r.transpose(1, 0, 3, 2).conj())))
    if max(pair, conj) > 1e-10 * scale:
        raise GeometryError(f"curvature symmetries violated at {p}")
    return ComplexCurvature(tensor=r)


def real_curvature(
    curvature: ComplexCurvature,
    x: RealTangentVector,
    y: RealTangentVector,
    z: RealTangentVector,
    u: RealTangentVector,
) -> float:
    """R(X, Y, Z, U) as a real quadrilinear form."""
    w1 = np.outer(x.components, np.conj(y.components))
    w1 = w1 - w1.conj().T
    w2 = np.outer(z.components, np.conj(u.components))
    w2 = w2 - w2.conj().T
    return float(np.einsum("ijkl,ij,kl->", curvature.tensor, w1, w2).real)


def curvature_operator(
    curvature: ComplexCurvature,
    metric: HermitianMetric,
    x: RealTangentVector,
    y: RealTangentVector,
    z: RealTangentVector,
) -> np.ndarray:
    """Complex representative of the vector R(X, Y)Z.

    Defined by ``g(R(X,Y)Z, U) = R(X,Y,Z,U)`` for every U.
    """
    w1 = np.outer(x.components, np.conj(y.components))
    w1 = w1 - w1.conj().T
    a = np.einsum("ijkl,ij,k->l", curvature.tensor, w1, z.components)
    return np.linalg.solve(metric.matrix.T, a)


def ricci_at(
    manifold: KahlerManifold,
    p: Sequence[complex],
    metric: HermitianMetric | None = None,
    curvature: ComplexCurvature | None = None,
) -> RicciData:
    """Ricci tensor at ``p``, computed two ways and cross-checked.

    Route (a) contracts the curvature tensor with the inverse metric; route
    (b) uses the log-determinant identity through Jacobi's formula,
    ``S_{i jbar} = -tr(g^{-1} d_i d_jbar g) + tr(g^{-1} d_i g g^{-1} d_jbar g)``.
    The two must agree to 1e-8.
    """
    p = manifold.require_in_domain(p)
    if metric is None:
        metric = metric_at(manifold, p)
    if curvature is None:
        curvature = curvature_at(manifold, p, metric)
    ginv = metric.inverse
    s_contract = np.einsum("li,ijkl->kj", ginv, curvature.tensor)

    a = manifold.assignment(p)
    dg, dgb = manifold._dg_values(a)
    d2g = manifold._d2g_values(a)
    t1 = np.einsum("ab,ijba->ij", ginv, d2g)
    t2 = np.einsum("ab,ibc,cd,jda->ij", ginv, dg, ginv, dgb)
    s_logdet = -t1 + t2

    scale = max(1.0, float(np.max(np.abs(s_contract))))
    if float(np.max(np.abs(s_contract - s_logdet))) > 1e-8 * scale:
        raise GeometryError(f"Ricci computation routes disagree at {p}")
    s = 0.5 * (s_contract + s_contract.conj().T)
    return RicciData(matrix=s, metric=metric)


def scalar_curvature_at(
    manifold: KahlerManifold,
    p: Sequence[complex],
    ricci: RicciData | None = None,
) -> float:
    """Scalar curvature: trace of S over any g-orthonormal real basis.

    Equals ``2 g^{i jbar} S_{i jbar}``; the factor 2 accounts for the real
    dimension being twice the complex one.
    """
    if ricci is None:
        ricci = ricci_at(manifold, p)
    return 2.0 * float(np.trace(ricci.matrix @ ricci.metric.inverse).real)


_PIVOT = 1e-8


def orthonormal_antiholomorphic_frame(
    manifold: KahlerManifold,
    p: Sequence[complex],
    k: int,
    rng: np.random.Generator,
    metric: HermitianMetric | None = None,
) -> list[RealTangentVector]:
    """k unit vectors spanning an antiholomorphic k-plane at ``p``.

    The returned vectors satisfy ``g(x_a, x_b) = delta_ab`` and
    ``g(x_a, J x_b) = 0``; equivalently their complex representatives are
    orthogonal for the Hermitian form h with ``h(v_a, v_a) = 1/2``.
    Gram-Schmidt over h with complex Gaussian seeds; restarts on
    near-dependent draws.
    """
    if k > manifold.m:
        raise FrameError(
            f"no antiholomorphic {k}-plane exists: k={k} exceeds complex dimension {manifold.m}"
        )
    if metric is None:
        metric = metric_at(manifold, p)
    h = metric.hermitian_product
    for _ in range(64):
        raw = rng.normal(size=(k, manifold.m)) + 1j * rng.normal(size=(k, manifold.m))
        basis: list[np.ndarray] = []
        for w in raw:
            for v in basis:
                w = w - (h(w, v) / h(v, v)) * v
            norm = math.sqrt(max(h(w, w).real, 0.0))
            if norm < _PIVOT:
                basis = []
                break
            basis.append(w)
        if len(basis) == k:
            return [
                RealTangentVector(v / math.sqrt(2.0 * h(v, v).real)) for v in basis
            ]
    raise FrameError("failed to draw an independent frame")


def orthonormal_holomorphic_basis(
    manifold: KahlerManifold,
    p: Sequence[complex],
    rng: np.random.Generator,
    metric: HermitianMetric | None = None,
) -> list[RealTangentVector]:
    """Vectors e_1..e_m such that {e_i, J e_i} is a g-orthonormal basis."""
    return orthonormal_antiholomorphic_frame(manifold, p, manifold.m, rng, metric)


def random_unit_tangent(
    metric: HermitianMetric, m: int, rng: np.random.Generator
) -> RealTangentVector:
    """Random g-unit tangent vector (complex Gaussian direction)."""
    while True:
        v = rng.normal(size=m) + 1j * rng.normal(size=m)
        x = RealTangentVector(v)
        n = metric.norm(x)
        if n > 1e-6:
            return RealTangentVector(v / n)


def random_real_orthonormal_basis(
    metric: HermitianMetric, m: int, rng: np.random.Generator
) -> list[RealTangentVector]:
    """Random g-orthonormal basis of the real 2m-dimensional tangent space.

    Gram-Schmidt with real coefficients over 2m complex Gaussian seeds.
    """
    for _ in range(64):
        raw = rng.normal(size=(2 * m, m)) + 1j * rng.normal(size=(2 * m, m))
        basis: list[RealTangentVector] = []
        for w in raw:
            x = RealTangentVector(w)
            for b in basis:
                x = RealTangentVector(x.components - metric.inner(x, b) * b.components)
            n = metric.norm(x)
            if n < _PIVOT:
                basis = []
                break
            basis.append(RealTangentVector(x.components / n))
        if len(basis) == 2 * m:
            return basis
    raise FrameError("failed to draw an independent real basis")
