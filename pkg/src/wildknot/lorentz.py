"""Lorentz-model primitives for Moebius geometry on the 4-sphere.

Points of S^4 = R^4 + {inf} are modelled as rays on the positive light cone
of R^{5,1} with the quadratic form

    Q(x, y) = x1 y1 + ... + x5 y5 - x6 y6,

round 3-spheres (and hyperplanes, which are spheres through infinity) as unit
spacelike "polar" vectors, and Moebius transformations as 6x6 orthochronous
Lorentz matrices acting on everything at once.  All the geometry downstream
(ball covers, reflection groups, bending) reduces to Q-arithmetic here.

Sign convention: polars are oriented so that a point p lies in the *open
interior* of a ball iff Q(lift(p), polar) < 0.  With that orientation the
product Q(u, v) of two polars is -cos(theta) for spheres crossing at exterior
dihedral angle theta, < -1 for spheres with disjoint exteriors-of-interiors
(i.e. disjoint balls) and > +1 for nested ones.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

J = np.diag([1.0, 1.0, 1.0, 1.0, 1.0, -1.0])

# Cosines that give a finite-order composite of the two reflections; the
# exterior angle theta and its complement pi - theta generate the same
# dihedral group, so both signs of the cosine are legal for a given order.
ORDER_COSINES = {2: (0.0,), 3: (0.5, -0.5)}


def q(u, v):
    """Lorentz inner product; broadcasts over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return (u[..., :5] * v[..., :5]).sum(axis=-1) - u[..., 5] * v[..., 5]


def lift(p):
    """Light-cone lift of a finite point of R^4 (broadcasts over rows)."""
    p = np.asarray(p, dtype=float)
    n2 = (p * p).sum(axis=-1)
    return np.concatenate(
        [p, ((n2 - 1.0) / 2.0)[..., None], ((n2 + 1.0) / 2.0)[..., None]],
        axis=-1,
    )


def lift_infinity():
    return np.array([0.0, 0.0, 0.0, 0.0, 1.0, 1.0])


def project(w, tol=1e-12):
    """Inverse of lift: light-cone vector -> point of R^4, or None for inf."""
    w = np.asarray(w, dtype=float)
    scale = w[5] - w[4]
    if abs(scale) <= tol * max(1.0, abs(w[5]) + abs(w[4])):
        return None
    return w[:4] / scale


def sphere(center, radius):
    """Polar vector of the round 3-sphere with given Euclidean data."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    c = np.asarray(center, dtype=float)
    a = float(c @ c) - radius * radius
    v = np.concatenate([c / radius, [(a - 1.0) / (2.0 * radius), (a + 1.0) / (2.0 * radius)]])
    return -v  # interior-negative orientation, see module docstring


def spheres(centers, radii):
    """Vectorized polar vectors: (N,4) centers, (N,) radii -> (N,6) polars."""
    c = np.asarray(centers, dtype=float)
    r = np.asarray(radii, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    a = (c * c).sum(axis=1) - r * r
    out = np.empty((len(r), 6))
    out[:, :4] = c / r[:, None]
    out[:, 4] = (a - 1.0) / (2.0 * r)
    out[:, 5] = (a + 1.0) / (2.0 * r)
    return -out


def hyperplane(normal, offset):
    """Polar of the hyperplane n.x = offset; interior is the side n.x < offset."""
    n = np.asarray(normal, dtype=float)
    norm = math.sqrt(float(n @ n))
    if norm == 0.0:
        raise ValueError("normal must be nonzero")
    n = n / norm
    s = offset / norm
    return np.concatenate([n, [s, s]])


def center_radius(polar, tol=1e-12):
    """Euclidean (center, radius) of a polar, or (normal, offset) flagged None.

    Returns (center, radius) for a genuine sphere and (normal, offset, None)
    is not a thing -- for hyperplanes raises ValueError; callers that may see
    hyperplanes should test `is_hyperplane` first.
    """
    v = np.asarray(polar, dtype=float)
    inv_r = v[4] - v[5]  # equals 1/r in the interior-negative orientation
    if abs(inv_r) <= tol:
        raise ValueError("polar describes a hyperplane (sphere through infinity)")
    r = 1.0 / inv_r
    c = -v[:4] * abs(r)
    if r < 0:
        # Opposite orientation: same sphere, interior flipped.
        c = v[:4] * abs(r)
    return c, abs(r)


def is_hyperplane(polar, tol=1e-12):
    return abs(polar[4] - polar[5]) <= tol


def centers_radii(polars, tol=1e-12):
    """Vectorized inverse of `spheres`: (N,6) polars -> (centers, radii).

    Raises on hyperplanes (spheres through infinity); accepts either
    orientation and returns positive radii.
    """
    v = np.asarray(polars, dtype=float)
    inv_r = v[:, 4] - v[:, 5]
    if np.any(np.abs(inv_r) <= tol):
        raise ValueError("polar describes a hyperplane (sphere through infinity)")
    r = 1.0 / inv_r
    c = -v[:, :4] * r[:, None]
    return c, np.abs(r)


def translation(b):
    """Lorentz matrix of the Euclidean translation x -> x + b.

    Built exactly as the product of reflections in the two parallel
    hyperplanes n.x = 0 and n.x = |b|/2 with n = b/|b|.
    """
    b = np.asarray(b, dtype=float)
    norm = math.sqrt(float(b @ b))
    if norm == 0.0:
        return np.eye(6)
    n = b / norm
    return reflection(hyperplane(n, norm / 2.0)) @ reflection(hyperplane(n, 0.0))


def reflection(polar):
    """Lorentz matrix of inversion in the sphere with the given unit polar."""
    v = np.asarray(polar, dtype=float)
    return np.eye(6) - 2.0 * np.outer(v, J @ v)


def inverse(m):
    """Group inverse via the Lorentz adjugate J M^T J (never numeric inv)."""
    return J @ np.asarray(m).T @ J


def lorentz_defect(m):
    """Max-norm drift of M from O(5,1): || M^T J M - J ||_inf."""
    m = np.asarray(m, dtype=float)
    return float(np.max(np.abs(m.T @ J @ m - J)))


def apply_to_point(m, p):
    """Apply a Lorentz matrix to a point of S^4 (p=None means infinity)."""
    w = lift_infinity() if p is None else lift(np.asarray(p, dtype=float))
    return project(np.asarray(m) @ w)


def apply_to_polar(m, polar):
    return np.asarray(m) @ np.asarray(polar, dtype=float)


def point_side(polar, p):
    """Q(lift(p), polar): negative inside, zero on, positive outside."""
    w = lift_infinity() if p is None else lift(np.asarray(p, dtype=float))
    return float(q(w, polar))


@dataclasses.dataclass(frozen=True)
class PairConfiguration:
    """Relative position of two spheres, derived from the inversive product."""

    kind: str  # 'intersecting' | 'tangent' | 'disjoint' | 'nested' | 'equal'
    inversive_product: float
    exterior_cos: float  # -Q; equals (d^2-r1^2-r2^2)/(2 r1 r2) for spheres
    angle: float | None  # exterior dihedral angle in (0, pi), intersecting only
    order: int | None  # m with (R1 R2)^m = I when angle is pi/m or its complement


def pair_configuration(u, v, angle_tol=1e-9, tangency_tol=1e-9):
    prod = float(q(u, v))
    ext_cos = -prod
    if abs(prod) < 1.0 - tangency_tol:
        angle = math.acos(max(-1.0, min(1.0, ext_cos)))
        order = None
        for m, cosines in ORDER_COSINES.items():
            if any(abs(ext_cos - c) <= angle_tol for c in cosines):
                order = m
        return PairConfiguration("intersecting", prod, ext_cos, angle, order)
    if abs(abs(prod) - 1.0) <= tangency_tol:
        if abs(prod - 1.0) <= tangency_tol and abs(float(q(u, u) - q(v, v))) <= tangency_tol:
            # same unit polar up to orientation: tangency of a sphere with itself
            if float(np.max(np.abs(np.asarray(u) - np.asarray(v)))) <= tangency_tol:
                return PairConfiguration("equal", prod, ext_cos, None, None)
        return PairConfiguration("tangent", prod, ext_cos, None, None)
    if prod < -1.0:
        return PairConfiguration("disjoint", prod, ext_cos, None, None)
    return PairConfiguration("nested", prod, ext_cos, None, None)


def euclidean_exterior_cos(c1, r1, c2, r2):
    """Independent Euclidean oracle for the exterior dihedral cosine."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    d2 = float(((c1 - c2) ** 2).sum())
    return (d2 - r1 * r1 - r2 * r2) / (2.0 * r1 * r2)


def classify_map(m, tol=1e-9):
    """Classify a Lorentz matrix as identity/elliptic/parabolic/loxodromic.

    Returns (kind, data): for loxodromic maps data is (dilation, attracting
    fixed point, repelling fixed point) with fixed points as R^4 vectors or
    None for infinity; otherwise data is None.
    """
    m = np.asarray(m, dtype=float)
    if np.max(np.abs(m - np.eye(6))) <= tol:
        return "identity", None
    # Eigenvalue moduli are too noisy to separate parabolic from mildly
    # loxodromic directly; instead look at the growth of ||M^(2^k)|| under
    # repeated squaring with renormalisation.  log-norm L_k is bounded for
    # elliptic, ~2k log 2 for parabolic (polynomial growth) and ~2^k log(lam)
    # for loxodromic, so the ratio L_10 / L_9 cleanly separates the latter two.
    cur = m.copy()
    log_norm = math.log(np.max(np.abs(cur)))
    cur = cur / np.max(np.abs(cur))
    logs = [log_norm]
    for _ in range(10):
        cur = cur @ cur
        n = np.max(np.abs(cur))
        log_norm = 2.0 * log_norm + math.log(n)
        cur = cur / n
        logs.append(log_norm)
    if logs[-1] < math.log(1e4 * (1.0 + np.max(np.abs(m)))):
        return "elliptic", None
    if logs[-1] / max(logs[-2], 1e-30) > 1.5:
        vals, vecs = np.linalg.eig(m)
        moduli = np.abs(vals)
        i_max = int(np.argmax(moduli))
        i_min = int(np.argmin(moduli))
        lam = float(moduli[i_max])
        # polish the eigenvectors by power iteration: eig's output for a
        # nonsymmetric matrix at lattice scale carries ~1e-7 absolute noise,
        # while each multiply contracts the off-dominant error by 1/lam
        att = _lightlike_fixed_point(_power_polish(m, vecs[:, i_max]))
        rep = _lightlike_fixed_point(_power_polish(inverse(m), vecs[:, i_min]))
        return "loxodromic", (lam, att, rep)
    return "parabolic", None


def _power_polish(m, col, iterations=64):
    v = np.real(np.real_if_close(col, tol=1e6))
    for _ in range(iterations):
        w = m @ v
        norm = np.max(np.abs(w))
        if norm == 0 or not np.isfinite(norm):
            return v
        w = w / norm
        if np.max(np.abs(w - v)) <= 1e-16:
            return w
        v = w
    return v


def _lightlike_fixed_point(col):
    v = np.real_if_close(col, tol=1e6)
    v = np.real(v)
    norm = np.max(np.abs(v))
    if norm == 0:
        return None
    v = v / norm
    # orient to the positive cone
    if v[5] < 0:
        v = -v
    return project(v)


def random_moebius(rng, n_reflections=4, scale=2.0):
    """Deterministic pseudo-random Moebius map: product of sphere inversions."""
    m = np.eye(6)
    for _ in range(n_reflections):
        c = rng.uniform(-scale, scale, size=4)
        r = rng.uniform(0.3, scale)
        m = m @ reflection(sphere(c, r))
    return m
