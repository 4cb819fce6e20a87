"""Canonical theta bases of H^0(A, L^m) by certified truncated lattice sums.

The basis attached to level m is

    theta_c(z) = sum_{l in Z^g + c} exp(pi i m l^T Omega l + 2 pi i m l^T z),

with characteristics c running over (m Delta)^{-1} Z^g / Z^g.  Under this
choice the factor of automorphy of L^m for a period Omega a + b
(a in Z^g, b in Delta Z^g) is

    e_m(lambda, z) = exp(-pi i m a^T Omega a - 2 pi i m a^T z),

independent of c, and the normalized theta-group action of
K(L^m)_1 = {Omega a} permutes characteristics: theta_c -> theta_{c+a}.

Evaluation strategy: every point is first translated into the fundamental
cell of the summation lattice (the quasi-periodicity factor is restored
exactly), then a centred integer box is summed.  The box radius follows the
Gaussian tail bound R = ceil(sqrt(log(1/eps) / (pi m lambda_min)) + |c| +
|yhat| + 2), which the doubling certificate checks empirically.  Values are
accurate to eps * exp(pi m y^T (Im Omega)^{-1} y), the natural growth
envelope; sections whose envelope exceeds the double-precision range raise
:class:`TruncationOverflow` (arbitrary precision is out of scope).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import NotInK1, NotLatticeVector, TruncationOverflow
from .torsion import TorsionPoint
from .varieties import PolarizedAbelianVariety

#: hard cap on the number of lattice points summed per evaluation
DEFAULT_CAPACITY = 4_000_000
#: largest exponent exp() can take before double overflow, with margin
_LOG_MAX = 700.0


@dataclass(frozen=True)
class SectionIndex:
    """Label (level m, characteristic c) of a canonical basis element.

    c is reduced mod Z^g into [0,1) componentwise; for a valid index
    (m Delta) c must be integral, which :func:`section_index` guarantees.
    """

    m: int
    c: tuple[Fraction, ...]

    def __init__(self, m: int, c: Sequence):
        if m < 1:
            raise ValueError(f"level must be >= 1, got {m}")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "c", tuple(Fraction(x) % 1 for x in c))

    @property
    def g(self) -> int:
        return len(self.c)

    def as_floats(self) -> np.ndarray:
        return np.array([float(x) for x in self.c])


def section_index(pav: PolarizedAbelianVariety, m: int, k: Sequence[int]) -> SectionIndex:
    """The index with characteristic c_i = k_i / (m d_i)."""
    d = pav.delta.divisors
    return SectionIndex(m, [Fraction(int(ki), m * di) for ki, di in zip(k, d, strict=True)])


def section_indices(pav: PolarizedAbelianVariety, m: int) -> tuple[SectionIndex, ...]:
    """All m^g d_1...d_g level-m indices, lexicographic in k."""
    d = pav.delta.divisors
    ranges = [range(m * di) for di in d]
    return tuple(section_index(pav, m, k) for k in itertools.product(*ranges))


def box_radius(lambda_min: float, m: int, eps: float, c_bound: float, yhat_bound: float) -> int:
    """Gaussian-tail truncation radius for a level-m sum."""
    if lambda_min <= 0:
        raise ValueError("lambda_min must be positive")
    return math.ceil(math.sqrt(math.log(1.0 / eps) / (math.pi * m * lambda_min)) + c_bound + yhat_bound + 2)


@dataclass(frozen=True)
class TruncationPlan:
    """Box radii per level for a fixed variety and target accuracy."""

    eps: float
    lambda_min: float
    radii: tuple[tuple[int, int], ...]
    capacity: int = DEFAULT_CAPACITY

    def radius(self, m: int) -> int:
        for level, r in self.radii:
            if level == m:
                return r
        raise KeyError(f"no radius planned for level {m}")


def truncation_plan(
    pav: PolarizedAbelianVariety,
    levels: Sequence[int],
    eps: float | None = None,
    capacity: int = DEFAULT_CAPACITY,
) -> TruncationPlan:
    """Plan box radii for the given levels; reduced points keep both the
    characteristic and the lattice coordinate of Im z within sqrt(g)/2."""
    eps = float(eps if eps is not None else pav.eps)
    lam = pav.lambda_min
    half = math.sqrt(pav.g) / 2.0
    radii = tuple((int(m), box_radius(lam, m, eps, half, half)) for m in levels)
    return TruncationPlan(eps, lam, radii, capacity)


class _LatticeSum:
    """Truncated sum over Z^g + c of exp(pi i m l^T tau l + 2 pi i m l^T z)."""

    def __init__(self, tau, m: int, eps: float, radius: int | None = None,
                 capacity: int = DEFAULT_CAPACITY):
        tau = np.asarray(tau, dtype=complex)
        self.tau = tau
        self.g = tau.shape[0]
        self.m = int(m)
        self.eps = float(eps)
        self.Y = tau.imag
        self.Yinv = np.linalg.inv(self.Y)
        self.lambda_min = float(np.linalg.eigvalsh(self.Y).min())
        self.capacity = int(capacity)
        half = math.sqrt(self.g) / 2.0
        self.radius = int(radius) if radius is not None else box_radius(
            self.lambda_min, self.m, self.eps, half, half
        )
        self._boxes: dict[int, np.ndarray] = {}
        self._box(self.radius)

    def _box(self, R: int) -> np.ndarray:
        box = self._boxes.get(R)
        if box is None:
            cells = (2 * R + 1) ** self.g
            if cells > self.capacity:
                raise TruncationOverflow(
                    f"radius {R} needs {cells} lattice points, capacity is {self.capacity}"
                )
            box = np.array(
                list(itertools.product(range(-R, R + 1), repeat=self.g)), dtype=float
            )
            self._boxes[R] = box
        return box

    def _reduce(self, zs: np.ndarray):
        """Translate into the fundamental cell of tau Z^g + Z^g.

        Returns (z0, aint, bint, pref) with
        theta_c(z) = exp(2 pi i m c.bint) * exp(pref) * theta_c(z0).
        """
        aint = np.round(zs.imag @ self.Yinv.T)
        z1 = zs - aint @ self.tau.T
        bint = np.round(z1.real)
        z0 = z1 - bint
        quad = np.einsum("pi,ij,pj->p", aint, self.tau, aint)
        pref = -1j * math.pi * self.m * quad - 2j * math.pi * self.m * np.einsum(
            "pi,pi->p", aint, z0
        )
        return z0, aint, bint, pref

    def log_envelope(self, zs: np.ndarray) -> np.ndarray:
        """pi m y^T Y^{-1} y, the log of the growth envelope at each point."""
        y = np.asarray(zs).imag
        return math.pi * self.m * np.einsum("pi,ij,pj->p", y, self.Yinv, y)

    def eval(self, chars: np.ndarray, zs: np.ndarray, radius: int | None = None) -> np.ndarray:
        """Evaluate every characteristic at every point; returns (K, P)."""
        chars = np.atleast_2d(np.asarray(chars, dtype=float))
        zs = np.atleast_2d(np.asarray(zs, dtype=complex))
        z0, _, bint, pref = self._reduce(zs)
        env = self.log_envelope(z0) + pref.real
        if env.size and float(env.max()) > _LOG_MAX:
            raise TruncationOverflow(
                "section value exceeds double-precision range "
                f"(log envelope {float(env.max()):.1f})"
            )
        box = self._box(int(radius) if radius is not None else self.radius)
        cshift = chars - np.round(chars)
        ell = cshift[:, None, :] + box[None, :, :]  # (K, B, g)
        quad = np.einsum("kbi,ij,kbj->kb", ell, self.tau, ell)
        K, B = quad.shape
        P = z0.shape[0]
        out = np.empty((K, P), dtype=complex)
        step = max(1, 2_000_000 // max(1, K * B))
        for lo in range(0, P, step):
            hi = min(P, lo + step)
            lin = np.einsum("kbi,pi->kbp", ell, z0[lo:hi])
            out[:, lo:hi] = np.exp(
                1j * math.pi * self.m * quad[:, :, None] + 2j * math.pi * self.m * lin
            ).sum(axis=1)
        phase = np.exp(2j * math.pi * self.m * (chars @ bint.T))
        return out * phase * np.exp(pref)[None, :]


def _points_2d(zs) -> tuple[np.ndarray, bool]:
    arr = np.asarray(zs, dtype=complex)
    if arr.ndim == 1:
        return arr[None, :], True
    return arr, False


class ThetaBasis:
    """The canonical basis of H^0(A, L^m) as a batch evaluator.

    Evaluations are pure; batches over point sets may run concurrently and
    results are assembled in input order.
    """

    def __init__(self, pav: PolarizedAbelianVariety, m: int, *,
                 eps: float | None = None, radius: int | None = None,
                 plan: TruncationPlan | None = None,
                 capacity: int | None = None):
        self.pav = pav
        self.m = int(m)
        self.indices = section_indices(pav, m)
        self._pos = {idx: i for i, idx in enumerate(self.indices)}
        if plan is not None:
            eps = plan.eps if eps is None else eps
            radius = plan.radius(m) if radius is None else radius
            capacity = plan.capacity if capacity is None else capacity
        self._sum = _LatticeSum(
            pav.matrix, m,
            float(eps if eps is not None else pav.eps),
            radius,
            capacity if capacity is not None else DEFAULT_CAPACITY,
        )
        self._chars = np.array([idx.as_floats() for idx in self.indices])

    @property
    def dim(self) -> int:
        return len(self.indices)

    @property
    def radius(self) -> int:
        return self._sum.radius

    def position(self, idx: SectionIndex) -> int:
        try:
            return self._pos[idx]
        except KeyError:
            raise KeyError(f"{idx} is not a level-{self.m} index of this polarization") from None

    def eval_matrix(self, zs, radius: int | None = None) -> np.ndarray:
        """Values of all basis elements at all points, shape (dim, npoints)."""
        pts, _ = _points_2d(zs)
        return self._sum.eval(self._chars, pts, radius=radius)

    def eval(self, idx: SectionIndex, z, radius: int | None = None):
        """Value(s) of one basis element; scalar for a single point."""
        pts, single = _points_2d(z)
        chars = self._chars[self.position(idx)][None, :]
        vals = self._sum.eval(chars, pts, radius=radius)[0]
        return complex(vals[0]) if single else vals

    def log_envelope(self, zs) -> np.ndarray:
        pts, _ = _points_2d(zs)
        return self._sum.log_envelope(pts)

    def weights(self, zs) -> np.ndarray:
        """Row weights exp(-pi m y^T Y^{-1} y), the inverse growth envelope."""
        return np.exp(-self.log_envelope(zs))


class ThetaTilde:
    """The K(M^n)_1-invariant section of M^n on a principally polarized variety.

    Realized as the theta series of the quotient period matrix Omega/n:
    theta~(z) = sum_{l in Z^g} exp(pi i l^T (Omega/n) l + 2 pi i l^T z).
    It satisfies the level-n factor of automorphy and equals the sum of all
    level-n basis elements (fixed normalization, no free scalar here).
    """

    def __init__(self, pav: PolarizedAbelianVariety, n: int, *,
                 eps: float | None = None, radius: int | None = None,
                 capacity: int | None = None):
        if not pav.delta.is_principal:
            raise ValueError("theta~ is defined for principal polarizations only")
        if n < 1:
            raise ValueError(f"require n >= 1, got {n}")
        self.pav = pav
        self.n = int(n)
        self._sum = _LatticeSum(
            pav.matrix / n, 1,
            float(eps if eps is not None else pav.eps),
            radius,
            capacity if capacity is not None else DEFAULT_CAPACITY,
        )
        self._zero = np.zeros((1, pav.g))

    @property
    def radius(self) -> int:
        return self._sum.radius

    def eval_many(self, zs, radius: int | None = None) -> np.ndarray:
        pts, _ = _points_2d(zs)
        return self._sum.eval(self._zero, pts, radius=radius)[0]

    def eval(self, z, radius: int | None = None) -> complex:
        return complex(self.eval_many(np.asarray(z, dtype=complex)[None, :], radius=radius)[0])


def theta_basis_eval(pav: PolarizedAbelianVariety, idx: SectionIndex, z, *,
                     radius: int | None = None):
    """One-shot evaluation of theta_c^{(m)} at z (prefer ThetaBasis for batches)."""
    return ThetaBasis(pav, idx.m).eval(idx, z, radius=radius)


def invariant_theta_tilde(pav: PolarizedAbelianVariety, n: int, z, *,
                          radius: int | None = None) -> complex:
    """One-shot evaluation of the invariant section theta~ of M^n."""
    return ThetaTilde(pav, n).eval(z, radius=radius)


def lattice_coordinates(pav: PolarizedAbelianVariety, lam, tol: float = 1e-9):
    """Integer coordinates (a, bhat) with lam = Omega a + Delta bhat.

    Raises :class:`NotLatticeVector` when lam is not a period within tol.
    """
    lam = np.asarray(lam, dtype=complex)
    a = pav.im_inv @ lam.imag
    aint = np.round(a)
    if np.abs(a - aint).max() > tol * (1.0 + np.abs(aint).max()):
        raise NotLatticeVector(f"imaginary part off-lattice by {np.abs(a - aint).max():.3e}")
    rest = lam.real - pav.matrix.real @ aint
    bhat = rest / pav.delta.as_diagonal()
    bint = np.round(bhat)
    if np.abs(bhat - bint).max() > tol * (1.0 + np.abs(bint).max()):
        raise NotLatticeVector(f"real part off Delta Z^g by {np.abs(bhat - bint).max():.3e}")
    return aint.astype(int), bint.astype(int)


def automorphy_factor(pav: PolarizedAbelianVariety, m: int, lam, z):
    """The level-m cocycle e_m(lambda, z) = exp(-pi i m a^T Omega a - 2 pi i m a^T z)
    for a period lambda = Omega a + b, b in Delta Z^g."""
    aint, _ = lattice_coordinates(pav, lam)
    a = aint.astype(float)
    z = np.asarray(z, dtype=complex)
    return np.exp(-1j * math.pi * m * (a @ pav.matrix @ a) - 2j * math.pi * m * (z @ a))


def quasi_periodicity_residual(pav: PolarizedAbelianVariety, idx: SectionIndex, lam, z,
                               basis: ThetaBasis | None = None) -> float:
    """|theta_c(z + lam) - e(lam, z) theta_c(z)| / (1 + |theta_c(z)|).

    Vanishes (to evaluation accuracy) when lam is a period; for non-periods
    the same formula is applied with the real solution a of Im lam = Y a,
    and the residual is O(1) generically.
    """
    basis = basis if basis is not None else ThetaBasis(pav, idx.m)
    lam = np.asarray(lam, dtype=complex)
    z = np.asarray(z, dtype=complex)
    a = pav.im_inv @ lam.imag
    m = idx.m
    e = np.exp(-1j * math.pi * m * (a @ pav.matrix @ a) - 2j * math.pi * m * (z @ a))
    t_shift = basis.eval(idx, z + lam)
    t_base = basis.eval(idx, z)
    return float(abs(t_shift - e * t_base) / (1.0 + abs(t_base)))


def translate_action(pav: PolarizedAbelianVariety, m: int, x: TorsionPoint,
                     idx: SectionIndex) -> tuple[SectionIndex, Callable]:
    """Normalized theta-group action of x = Omega a in K(L^m)_1 on the basis.

    Returns (shifted index, stripping factor): the translate satisfies
    theta_c(z + x) = factor(z) * theta_{c+a}(z) exactly, so after stripping
    the factor the action is the pure permutation c -> c + a.
    """
    for i, (ai, bi, di) in enumerate(zip(x.a, x.b, x.divisors, strict=True)):
        if bi != 0:
            raise NotInK1(f"x has a nonzero real component b_{i} = {bi}")
        if (m * di * ai).denominator != 1:
            raise NotInK1(f"x is not in K(L^{m})_1: a_{i} = {ai}")
    new_idx = SectionIndex(m, [ci + ai for ci, ai in zip(idx.c, x.a)])
    a = np.array([float(v) for v in x.a])
    omega = pav.matrix
    quad = a @ omega @ a

    def factor(z):
        z = np.asarray(z, dtype=complex)
        return np.exp(-1j * math.pi * m * quad - 2j * math.pi * m * (z @ a))

    return new_idx, factor


def log_section_envelope(pav: PolarizedAbelianVariety, m: int, zs) -> np.ndarray:
    """pi m y^T Y^{-1} y per point: log of the natural growth envelope of L^m."""
    pts, _ = _points_2d(zs)
    y = pts.imag
    return math.pi * m * np.einsum("pi,ij,pj->p", y, pav.im_inv, y)


def section_weights(pav: PolarizedAbelianVariety, m: int, zs) -> np.ndarray:
    """exp(-pi m y^T Y^{-1} y): equilibration weights for sampled sections."""
    return np.exp(-log_section_envelope(pav, m, zs))
