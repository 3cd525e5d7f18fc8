"""One-parameter bending deformations along amalgam subgroups.

Each amalgam is four vertex-ball reflections around a shared square.  The
four spheres admit a common orthogonal circle: it is centered at the square's
center, lies in the square's 2-plane, and has radius rho with
rho^2 = d^2 - r^2 (d = center-to-vertex distance, r = ball radius); for a
square of edge ell and r = ell/sqrt(3) this is ell/sqrt(6).  The bending map
E_t fixes that circle pointwise and rotates the complementary coordinate
2-plane by angle t about the circle's center; it therefore commutes with all
four amalgam reflections, and conjugating every generator on one side of the
amalgam by E_t yields a new representation of the same abstract group.

All matrices here live in the *amalgam frame*: coordinates translated so the
square's center is the origin.  That translation is an exact group
conjugation, makes E_t a pure block rotation, and keeps the matrices of the
nearby generators (the only ones entering genuinely new relations)
well-conditioned.  Relations between generators on a common side are
untouched by the deformation -- (E R_i E^-1)(E R_j E^-1) = E R_i R_j E^-1
identically -- so they are certified once by the base group's relation suite
rather than re-measured through an ill-conditioned conjugation.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import lorentz as lz
from .groups import GroupError, reflection_matrices


@dataclasses.dataclass
class BendingLocus:
    amalgam_index: int
    center: np.ndarray  # (4,) circle center = square center
    radius: float
    plane_axes: tuple  # the square's two spanned axes (circle plane)
    rotation_axes: tuple  # the complementary two axes rotated by E_t
    orthogonality_residuals: np.ndarray  # per Gamma_j sphere, |d^2 - rho^2 - r^2|


@dataclasses.dataclass
class BentRepresentation:
    group: object
    amalgam_index: int
    t: float
    locus: BendingLocus
    side_b: frozenset  # ball ids conjugated by E_t
    e_matrix: np.ndarray  # E_t in the amalgam frame
    relation_report: dict

    def generator_matrix(self, ball):
        """Image of generator `ball`, in the amalgam frame."""
        m = _frame_reflection(self.group.cover, ball, self.locus.center)
        if ball in self.side_b:
            m = self.e_matrix @ m @ lz.inverse(self.e_matrix)
        return m

    def word_matrix(self, balls):
        m = np.eye(6)
        for b in balls:
            m = m @ self.generator_matrix(b)
        return m


def _frame_reflection(cover, ball, origin):
    polar = lz.sphere(cover.centers[ball] - origin, cover.radii[ball])
    return lz.reflection(polar)


def bending_locus(group, j, tol=1e-9):
    if not 0 <= j < len(group.amalgams):
        raise GroupError(f"amalgam index {j} out of range")
    am = group.amalgams[j]
    cover = group.cover
    plane_axes = tuple(a for a in range(4) if am.square[a][1] > am.square[a][0])
    rotation_axes = tuple(a for a in range(4) if a not in plane_axes)
    center = np.array([(lo + hi) / 2.0 for lo, hi in am.square], dtype=float)
    balls = list(am.ball_ids)
    d2 = ((cover.centers[balls] - center[None, :]) ** 2).sum(axis=1)
    r2 = cover.radii[balls] ** 2
    rho2 = d2 - r2
    if np.any(rho2 <= 0) or np.ptp(rho2) > tol:
        raise GroupError(
            f"amalgam {j} has no common orthogonal circle: rho^2 spread {rho2}"
        )
    rho = math.sqrt(float(rho2.mean()))
    residuals = np.abs(d2 - rho * rho - r2)
    # the spheres must also be centered in the circle's 2-plane
    for a in rotation_axes:
        residuals = np.maximum(
            residuals, np.abs(cover.centers[balls, a] - center[a])
        )
    if residuals.max() > tol:
        raise GroupError(f"amalgam {j} orthogonality residual {residuals.max()}")
    return BendingLocus(
        amalgam_index=j,
        center=center,
        radius=rho,
        plane_axes=plane_axes,
        rotation_axes=rotation_axes,
        orthogonality_residuals=residuals,
    )


def bending_rotation(locus, t):
    """E_t in the amalgam frame: rotation by t in the complementary 2-plane.

    Fixes the circle's 2-plane (and the circle itself) pointwise; E_t E_s =
    E_{t+s} and E_0 = I hold by construction of the rotation block.
    """
    p, q = locus.rotation_axes
    e = np.eye(6)
    e[p, p] = math.cos(t)
    e[q, q] = math.cos(t)
    e[p, q] = -math.sin(t)
    e[q, p] = math.sin(t)
    return e


def commutation_residual(group, locus, t):
    """max || E_t R E_t^-1 - R ||_inf over the four amalgam reflections."""
    e = bending_rotation(locus, t)
    e_inv = lz.inverse(e)
    worst = 0.0
    am = group.amalgams[locus.amalgam_index]
    for ball in am.ball_ids:
        r = _frame_reflection(group.cover, ball, locus.center)
        worst = max(worst, float(np.abs(e @ r @ e_inv - r).max()))
    return worst


def split_sides(group, j):
    """(side_a, side_b) ball-id partitions at amalgam j, Gamma_j in side_a.

    Sides follow the cube chain: balls hosted in cubes up to the amalgam's
    first cube belong to side A, the rest to side B.
    """
    am = group.amalgams[j]
    pos = am.cube_pair[0]
    host = group.cover.host
    side_b = frozenset(int(i) for i in np.nonzero(host > pos)[0])
    side_a = frozenset(range(len(group.cover))) - side_b
    return side_a, side_b


def _commutes_with_rotation(cover, ball, locus, tol=1e-9):
    """A ball invariant under E_t (center on the rotation's fixed 2-plane)
    has a reflection commuting with E_t for every t."""
    return all(
        abs(cover.centers[ball, a] - locus.center[a]) <= tol
        for a in locus.rotation_axes
    )


def crossing_relations(group, j):
    """Finite-order pairs straddling amalgam j, flagged as bending-safe.

    A relation (i, k, m) with one member on each side survives one-sided
    conjugation iff one of its members commutes with E_t: then
    (R_i E R_k E^-1)^m collapses to a conjugate of the base relation.  That
    holds for the Gamma_j reflections and, more generally, for any ball
    centered on the rotation's fixed 2-plane (at a junction the entire
    plate of the big cube qualifies).  Pairs with no commuting member make
    the amalgam unsuitable for bending.
    """
    am = group.amalgams[j]
    gamma = set(am.ball_ids)
    locus = bending_locus(group, j)
    _side_a, side_b = split_sides(group, j)
    cover = group.cover
    out = []
    for i, k, m in group.relations:
        ib, kb = i in side_b, k in side_b
        if ib == kb:
            continue
        safe = (
            i in gamma
            or k in gamma
            or _commutes_with_rotation(cover, i, locus)
            or _commutes_with_rotation(cover, k, locus)
        )
        out.append((i, k, m, safe))
    return out


def bend(group, j, t, tol=1e-8):
    """Bent representation at angle t along amalgam j.

    Side-B generators are conjugated by E_t; Gamma_j and side A are kept.
    Every relation that genuinely mixes the two sides is re-verified on the
    images (in the amalgam frame); a residual above `tol` raises with the
    failing relation.  Same-side relations equal their base counterparts
    exactly (see module docstring) and are covered by the base suite.
    """
    locus = bending_locus(group, j)
    e = bending_rotation(locus, t)
    e_inv = lz.inverse(e)
    _side_a, side_b = split_sides(group, j)
    crossing = crossing_relations(group, j)

    eye = np.eye(6)
    max_residual = 0.0
    worst = None
    for i, k, m, a_in_gamma in crossing:
        mi = _frame_reflection(group.cover, i, locus.center)
        mk = _frame_reflection(group.cover, k, locus.center)
        if i in side_b:
            mi = e @ mi @ e_inv
        if k in side_b:
            mk = e @ mk @ e_inv
        prod = mi @ mk
        power = np.linalg.matrix_power(prod, m)
        res = float(np.abs(power - eye).max())
        if res > max_residual:
            max_residual = res
            worst = (i, k, m, a_in_gamma, res)
    if max_residual > tol:
        raise GroupError(
            f"bending at amalgam {j} breaks relation (R_{worst[0]} R_{worst[1]})"
            f"^{worst[2]} = 1: residual {worst[4]:.3e}"
            + ("" if worst[3] else " (no member commutes with the bending rotation)")
        )
    report = {
        "t": t,
        "n_crossing_relations": len(crossing),
        "max_residual": max_residual,
        "commutation_residual": commutation_residual(group, locus, t),
        "tolerance": tol,
    }
    return BentRepresentation(
        group=group,
        amalgam_index=j,
        t=t,
        locus=locus,
        side_b=side_b,
        e_matrix=e,
        relation_report=report,
    )


def suitable_amalgams(group):
    """Amalgam indices where every crossing relation has a member commuting
    with the bending rotation (the exact condition for one-sided conjugation
    to preserve all relations)."""
    return [
        j
        for j in range(len(group.amalgams))
        if all(flag for (_i, _k, _m, flag) in crossing_relations(group, j))
    ]


def crossing_word(group, j, gap=2):
    """A loxodromic word straddling amalgam j: reflections in two disjoint
    vertex balls taken `gap` cross-sections before and after the square."""
    am = group.amalgams[j]
    cover = group.cover
    locus_center = np.array([(lo + hi) / 2.0 for lo, hi in am.square])
    _side_a, side_b = split_sides(group, j)
    gamma = set(am.ball_ids)

    corner = min(am.ball_ids)  # a vertex ball on the square
    base = cover.centers[corner]

    def vertex_at(offset_axis_sign):
        axis, sign = offset_axis_sign
        target = base.copy()
        target[axis] += sign * gap
        return group.cover.vertex_index.get(tuple(int(round(x)) for x in target))

    candidates_a, candidates_b = [], []
    for axis in range(4):
        for sign in (-1, 1):
            v = vertex_at((axis, sign))
            if v is None or v in gamma:
                continue
            (candidates_b if v in side_b else candidates_a).append(v)
    for a in candidates_a:
        for b in candidates_b:
            d2 = float(((cover.centers[a] - cover.centers[b]) ** 2).sum())
            if d2 > (cover.radii[a] + cover.radii[b]) ** 2:
                return (a, b)
    raise GroupError(f"no disjoint crossing pair found at amalgam {j}")


def lambda_max(m):
    """Largest eigenvalue modulus (the dilation of a loxodromic map)."""
    return float(np.abs(np.linalg.eigvals(np.asarray(m, dtype=float))).max())
