"""Point-cloud approximations of the limit set, stage reports, and exports.

The limit set of the reflection group is the nested intersection of orbit
balls; it is approximated here by the centers of all orbit spheres below a
radius cutoff (every such sphere contains limit points, so each center is
within its radius of the limit set).  Loxodromic fixed points give a second,
independent family of sample points that must land inside the same nested
hull.  Clouds can be sliced along coordinate hyperplanes for 3D viewing and
exported in CSV, PLY 1.0 ascii, or JSON with byte-deterministic output.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from . import lorentz as lz


@dataclasses.dataclass
class PointCloud:
    points: np.ndarray  # (n, dim) finite coordinates
    provenance: list  # one string per point
    generation: np.ndarray  # (n,) int
    n_infinite: int = 0  # points at infinity excluded from `points`
    notice: str | None = None

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.points.shape[1] if self.points.size else self.points.shape[-1]


def _empty_cloud(dim, notice=None):
    return PointCloud(
        points=np.zeros((0, dim)),
        provenance=[],
        generation=np.zeros(0, dtype=np.int64),
        notice=notice,
    )


def cloud_from_orbit(orbit, eps, offset=None):
    """Centers of orbit spheres of radius < eps, in enumeration order.

    `offset` (from a recentered sub-assembly) is added back so clouds live
    in the complex's coordinates.  Every returned point is within eps of the
    limit set: the sphere around it contains limit points of its nesting
    chain.
    """
    keep = np.nonzero(orbit.radii < eps)[0]
    if len(keep) == 0:
        return _empty_cloud(
            4,
            notice=f"no orbit sphere has radius < {eps}; deepest radius is "
            f"{float(orbit.radii.min())} -- increase depth or eps",
        )
    pts = orbit.centers[keep].copy()
    if offset is not None:
        pts += np.asarray(offset, dtype=float)[None, :]
    return PointCloud(
        points=pts,
        provenance=[f"sphere_center({int(i)})" for i in keep],
        generation=orbit.generation[keep].copy(),
    )


def loxodromic_points(sub, n, seed=0, word_length=6):
    """Attracting fixed points of n sampled loxodromic words.

    Words are sampled as random cyclically reduced words of the given even
    length (no immediate repeats, first letter != last letter), so the
    attracting fixed point lies inside the word's own orbit sphere;
    non-loxodromic samples (possible when letters share a mirror pattern)
    are skipped and counted.  Points are reported in the sub-assembly's
    original coordinates (offset added back).
    """
    if word_length % 2:
        raise ValueError("word_length must be even (reflections are involutions)")
    rng = np.random.default_rng(seed)
    k = len(sub.ball_ids)
    if k < 3 and word_length > 2:
        raise ValueError("need at least 3 generators for cyclically reduced words")
    pts = []
    provenance = []
    skipped = 0
    n_infinite = 0
    attempts = 0
    while len(pts) < n and attempts < 50 * max(n, 1):
        attempts += 1
        word = [int(rng.integers(k))]
        while len(word) < word_length:
            g = int(rng.integers(k))
            if g == word[-1]:
                continue
            if len(word) == word_length - 1 and g == word[0]:
                continue
            word.append(g)
        m = np.eye(6)
        for g in word:
            m = m @ sub.matrices[g]
        kind, data = lz.classify_map(m)
        if kind != "loxodromic":
            skipped += 1
            continue
        _lam, att, _rep = data
        if att is None:
            n_infinite += 1
            continue
        pts.append(att + sub.offset)
        provenance.append("loxodromic_fixed(" + ",".join(map(str, word)) + ")")
    if not pts:
        return _empty_cloud(4, notice="no loxodromic words found"), skipped
    cloud = PointCloud(
        points=np.array(pts),
        provenance=provenance,
        generation=np.full(len(pts), word_length, dtype=np.int64),
        n_infinite=n_infinite,
    )
    return cloud, skipped


def containment_fraction(cloud, centers, radii, slack=0.0):
    """Fraction of cloud points inside at least one of the given balls."""
    if len(cloud) == 0:
        return 0.0
    d2 = ((cloud.points[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
    inside = (d2 <= (radii[None, :] + slack) ** 2).any(axis=1)
    return float(inside.mean())


def hausdorff_one_sided(cloud_a, cloud_b, block=1024):
    """sup over a in A of the distance from a to the set B."""
    if len(cloud_a) == 0:
        return 0.0
    if len(cloud_b) == 0:
        return float("inf")
    worst = 0.0
    for lo in range(0, len(cloud_a), block):
        d2 = (
            (cloud_a.points[lo : lo + block, None, :] - cloud_b.points[None, :, :]) ** 2
        ).sum(-1)
        worst = max(worst, float(np.sqrt(d2.min(axis=1)).max()))
    return worst


def stage_report(stages):
    """Formal connected-sum description per polyhedron stage."""
    out = []
    for s in stages:
        desc = "K_0 = base knot" if s.k == 0 else f"K_{s.k} = K_{s.k - 1} # K_{s.k - 1}"
        out.append(
            {
                "stage": s.k,
                "description": desc,
                "side_count": s.n_sides,
                "reflector_seq": s.reflector_seq,
                "invariant_stage_index": s.k,  # pairs with stage_polynomial(k)
            }
        )
    for prev, cur in zip(out, out[1:]):
        if cur["side_count"] <= prev["side_count"]:
            raise ValueError("stage side counts must strictly increase")
    return out


def slice_cloud(cloud, axis, value, thickness):
    """Points within `thickness` of the hyperplane x[axis]=value, as 3D."""
    if thickness <= 0:
        raise ValueError("thickness must be positive")
    if cloud.dim != 4:
        raise ValueError("slicing expects a 4D cloud")
    keep = np.nonzero(np.abs(cloud.points[:, axis] - value) <= thickness)[0]
    other = [a for a in range(4) if a != axis]
    if len(keep) == 0:
        return _empty_cloud(
            3, notice=f"no points within {thickness} of axis {axis} = {value}"
        )
    return PointCloud(
        points=cloud.points[np.ix_(keep, other)],
        provenance=[cloud.provenance[i] for i in keep],
        generation=cloud.generation[keep].copy(),
    )


# ---------------------------------------------------------------------------
# Exports (byte-deterministic)


def _fmt(x):
    return repr(float(x))


def export_cloud(cloud, fmt, path):
    if fmt == "csv":
        data = cloud_to_csv(cloud)
    elif fmt == "ply":
        data = cloud_to_ply(cloud)
    elif fmt == "json":
        data = cloud_to_json(cloud)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)
    return path


def cloud_to_csv(cloud):
    dim = cloud.points.shape[1] if len(cloud) else 4
    cols = ["x1", "x2", "x3", "x4"][:dim]
    lines = [",".join(cols + ["generation", "provenance"])]
    for i in range(len(cloud)):
        lines.append(
            ",".join(
                [_fmt(v) for v in cloud.points[i]]
                + [str(int(cloud.generation[i])), cloud.provenance[i]]
            )
        )
    return "\n".join(lines) + "\n"


def cloud_from_csv(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    dim = header.index("generation")
    pts, gens, prov = [], [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        pts.append([float(x) for x in parts[:dim]])
        gens.append(int(parts[dim]))
        prov.append(",".join(parts[dim + 1 :]))
    return PointCloud(
        points=np.array(pts).reshape(len(pts), dim),
        provenance=prov,
        generation=np.array(gens, dtype=np.int64),
    )


def cloud_to_ply(cloud):
    """PLY 1.0 ascii; vertices carry generation as an int scalar property.

    4D clouds store the fourth coordinate as an extra float property `w`.
    """
    dim = cloud.points.shape[1] if len(cloud) else 3
    if dim not in (3, 4):
        raise ValueError("PLY export expects a 3D slice or a 4D cloud")
    header = [
        "ply",
        "format ascii 1.0",
        "comment limit-set point cloud",
        f"element vertex {len(cloud)}",
        "property float x",
        "property float y",
        "property float z",
    ]
    if dim == 4:
        header.append("property float w")
    header += ["property int generation", "end_header"]
    rows = [
        " ".join([_fmt(v) for v in cloud.points[i]] + [str(int(cloud.generation[i]))])
        for i in range(len(cloud))
    ]
    return "\n".join(header + rows) + "\n"


def cloud_to_json(cloud):
    doc = {
        "dim": int(cloud.points.shape[1]) if len(cloud) else 4,
        "n_points": len(cloud),
        "n_infinite": cloud.n_infinite,
        "notice": cloud.notice,
        "points": [
            {
                "coords": [float(v) for v in cloud.points[i]],
                "generation": int(cloud.generation[i]),
                "provenance": cloud.provenance[i],
            }
            for i in range(len(cloud))
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
