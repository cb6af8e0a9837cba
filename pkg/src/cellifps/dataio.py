"""Point-cloud text I/O, synthetic shapes and viewpoint crops."""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from .core import NormalizationTransform, Point3, PointCloud

Format = Literal["xyz", "ply"]

# Vehicle proxy: a body box with a cabin box on top, in meters.
# x is length, y is width, z is height above the ground.
VEHICLE_BODY = ((-2.25, -0.9, 0.3), (2.25, 0.9, 1.0))
VEHICLE_CABIN = ((-1.2, -0.8, 1.0), (1.0, 0.8, 1.5))


def infer_format(path, fmt) -> str:
    if fmt is not None:
        fmt = fmt.lower()
        if fmt in ("ply", "ply-ascii"):
            return "ply"
        if fmt == "xyz":
            return "xyz"
        raise ValueError(f"unknown point format {fmt!r}")
    suffix = Path(path).suffix.lower()
    if suffix == ".ply":
        return "ply"
    if suffix in (".xyz", ".txt", ".pts"):
        return "xyz"
    raise ValueError(f"cannot infer point format from {path!s}; pass fmt='xyz' or 'ply'")


def _parse_record(parts, lineno: int, expect: int | None = None) -> list[float]:
    if expect is not None and len(parts) != expect or expect is None and len(parts) != 3:
        raise ValueError(f"line {lineno}: expected {expect or 3} values, got {len(parts)}")
    try:
        vals = [float(v) for v in parts]
    except ValueError:
        raise ValueError(f"line {lineno}: malformed number in {' '.join(parts)!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise ValueError(f"line {lineno}: non-finite coordinate")
    return vals


def _read_xyz(lines) -> list[list[float]]:
    rows = []
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        rows.append(_parse_record(text.split(), lineno))
    return rows


def _read_ply(lines) -> list[list[float]]:
    if not lines or lines[0].strip() != "ply":
        raise ValueError("line 1: missing 'ply' magic")
    count = None
    props: list[str] = []
    in_vertex = False
    body = None
    for lineno, line in enumerate(lines[1:], 2):
        words = line.split()
        if not words or words[0] in ("comment", "obj_info"):
            continue
        if words[0] == "format":
            if words[1:2] != ["ascii"]:
                raise ValueError(f"line {lineno}: only ASCII PLY is supported")
        elif words[0] == "element":
            in_vertex = words[1] == "vertex"
            if in_vertex:
                if count is not None:
                    raise ValueError(f"line {lineno}: duplicate vertex element")
                if props:
                    raise ValueError(f"line {lineno}: vertex element must come first")
                count = int(words[2])
        elif words[0] == "property":
            if in_vertex:
                props.append(words[-1])
        elif words[0] == "end_header":
            body = lineno
            break
        else:
            raise ValueError(f"line {lineno}: unexpected header line {line.strip()!r}")
    if body is None:
        raise ValueError("missing end_header")
    if count is None:
        raise ValueError("no vertex element in header")
    try:
        cols = [props.index(a) for a in ("x", "y", "z")]
    except ValueError:
        raise ValueError("vertex element lacks x, y, z properties") from None
    rows = []
    for k in range(count):
        lineno = body + 1 + k
        if lineno > len(lines):
            raise ValueError(f"line {lineno}: expected {count} vertex records, file ended")
        vals = _parse_record(lines[lineno - 1].split(), lineno, expect=len(props))
        rows.append([vals[c] for c in cols])
    return rows


def read_cloud(path, fmt: str | None = None) -> PointCloud:
    """Load an ASCII ``.xyz`` or ``.ply`` file; points keep their file order."""
    fmt = infer_format(path, fmt)
    with open(path, encoding="ascii", errors="strict") as f:
        lines = f.read().splitlines()
    rows = _read_xyz(lines) if fmt == "xyz" else _read_ply(lines)
    if not rows:
        raise ValueError("empty input")
    return PointCloud(rows)


def write_text_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_cloud(cloud: PointCloud, fmt: str = "xyz") -> str:
    if len(cloud) == 0:
        raise ValueError("empty input")
    fmt = infer_format("", fmt)
    # repr gives the shortest text that round-trips to the same float64.
    body = "".join(f"{x!r} {y!r} {z!r}\n" for x, y, z in cloud.xyz.tolist())
    if fmt == "xyz":
        return body
    header = (
        "ply\nformat ascii 1.0\n"
        f"element vertex {len(cloud)}\n"
        "property float x\nproperty float y\nproperty float z\n"
        "end_header\n"
    )
    return header + body


def write_cloud(cloud: PointCloud, path, fmt: str | None = None) -> None:
    """Write ``cloud`` as text. The file appears only once fully written."""
    write_text_atomic(path, format_cloud(cloud, infer_format(path, fmt)))


def write_transform(transform: NormalizationTransform, path) -> None:
    t = transform.translation
    write_text_atomic(path, f"translation {t.x!r} {t.y!r} {t.z!r}\nscale {transform.scale!r}\n")


def read_transform(path) -> NormalizationTransform:
    fields = {}
    with open(path, encoding="ascii") as f:
        for lineno, line in enumerate(f, 1):
            words = line.split()
            if not words:
                continue
            if words[0] == "translation" and len(words) == 4:
                fields["translation"] = Point3(*_parse_record(words[1:], lineno))
            elif words[0] == "scale" and len(words) == 2:
                fields["scale"] = float(words[1])
            else:
                raise ValueError(f"line {lineno}: unrecognized transform record")
    if set(fields) != {"translation", "scale"}:
        raise ValueError("transform file needs both 'translation' and 'scale'")
    return NormalizationTransform(fields["translation"], fields["scale"])


def _box_surface(rng: np.random.Generator, n: int, lo, hi) -> np.ndarray:
    """``n`` points uniform over the surface of the box ``[lo, hi]``."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    size = hi - lo
    # Faces come in pairs normal to x, y, z.
    areas = np.array([size[1] * size[2], size[0] * size[2], size[0] * size[1]])
    axis = rng.choice(3, size=n, p=areas / areas.sum())
    pts = lo + rng.random((n, 3)) * size
    side = rng.integers(0, 2, size=n)
    rows = np.arange(n)
    pts[rows, axis] = np.where(side == 1, hi[axis], lo[axis])
    return pts


def _inside(pts: np.ndarray, box) -> np.ndarray:
    lo, hi = np.asarray(box[0]), np.asarray(box[1])
    return np.all((pts > lo) & (pts < hi), axis=1)


def _vehicle_surface(rng: np.random.Generator, n: int) -> np.ndarray:
    body_lo, body_hi = map(np.asarray, VEHICLE_BODY)
    cab_lo, cab_hi = map(np.asarray, VEHICLE_CABIN)

    def area(lo, hi):
        s = hi - lo
        return 2 * (s[0] * s[1] + s[0] * s[2] + s[1] * s[2])

    w_body = area(body_lo, body_hi)
    w_cab = area(cab_lo, cab_hi)
    out = []
    have = 0
    while have < n:
        m = max(2 * (n - have), 64)
        from_body = rng.random(m) < w_body / (w_body + w_cab)
        k = int(from_body.sum())
        # Fill in place so body and cabin stay interleaved when the tail is cut.
        pts = np.empty((m, 3))
        pts[from_body] = _box_surface(rng, k, body_lo, body_hi)
        pts[~from_body] = _box_surface(rng, m - k, cab_lo, cab_hi)
        # Drop the interface where the cabin sits on the body roof.
        on_roof = np.isclose(pts[:, 2], cab_lo[2]) & np.all(
            (pts[:, :2] >= cab_lo[:2]) & (pts[:, :2] <= cab_hi[:2]), axis=1
        )
        keep = ~on_roof & ~_inside(pts, VEHICLE_BODY) & ~_inside(pts, VEHICLE_CABIN)
        pts = pts[keep]
        out.append(pts)
        have += len(pts)
    return np.concatenate(out)[:n]


def generate_shape(kind: str, n: int, rng_seed: int = 0) -> PointCloud:
    """``n`` points on the surface of a synthetic shape, deterministic per seed.

    ``sphere`` is the unit sphere, ``box`` the cube ``[-1, 1]^3``, and
    ``vehicle_proxy`` a 4.5 m x 1.8 m body (0.3 m to 1.0 m above ground)
    carrying a 2.2 m x 1.6 m x 0.5 m cabin, sampled uniformly by area.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(rng_seed)
    if kind == "sphere":
        pts = rng.standard_normal((n, 3))
        norms = np.sqrt((pts * pts).sum(axis=1))
        # A zero vector has no direction; redraw is overkill at this probability.
        norms[norms == 0] = 1.0
        pts = pts / norms[:, None]
    elif kind == "box":
        pts = _box_surface(rng, n, (-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))
    elif kind == "vehicle_proxy":
        pts = _vehicle_surface(rng, n)
    else:
        raise ValueError(f"unknown shape kind {kind!r}")
    return PointCloud(pts)


@dataclass(frozen=True)
class PartialPair:
    partial: PointCloud
    missing: PointCloud
    crop_center: Point3
    crop_fraction: float
    partial_indices: np.ndarray
    missing_indices: np.ndarray


def crop_missing(cloud: PointCloud, crop_center, crop_fraction: float) -> PartialPair:
    """Split off the ``round(crop_fraction * len(cloud))`` points nearest ``crop_center``.

    Ties in distance go to the lower index. Both halves keep source order.
    """
    if not 0 < crop_fraction < 1:
        raise ValueError(f"crop_fraction must be in (0, 1), got {crop_fraction}")
    size = len(cloud)
    if size == 0:
        raise ValueError("empty input")
    k = int(math.floor(crop_fraction * size + 0.5))
    if k < 1 or k >= size:
        raise ValueError(f"crop of {k} of {size} points leaves an empty side")
    center = Point3(*map(float, crop_center))
    d = cloud.xyz - np.asarray(center)
    dist = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2]
    order = np.argsort(dist, kind="stable")
    missing = np.sort(order[:k])
    partial = np.sort(order[k:])
    return PartialPair(cloud.take(partial), cloud.take(missing), center, float(crop_fraction), partial, missing)
