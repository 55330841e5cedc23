"""Synthetic benchmark datasets, nonlinear embeddings, and MNIST ingestion.

Four 2d families (two interleaved arcs, three spirals, a disk inside two
split rings, four Gaussian blobs) at three noise levels, each embeddable
in the plane, on a 3d coiled surface, on the coil with off-surface noise,
or rotated into 10d with isotropic noise. Every geometry constant lives in
GEOMETRY_DEFAULTS and can be overridden through the experiment config.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .base import PointSet
from .rng import as_generator, make_rng

TWO_ARCS = "two_arcs"
THREE_SPIRALS = "three_spirals"
THREE_RINGS = "three_rings"
FOUR_GAUSSIANS = "four_gaussians"
FAMILIES = (TWO_ARCS, THREE_SPIRALS, THREE_RINGS, FOUR_GAUSSIANS)

PLANE_2D = "plane2d"
SWISS_3D = "swiss3d"
SWISS_3D_NOISE = "swiss3d_noise"
ROT_10D_NOISE = "rot10d_noise"
EMBEDDINGS = (PLANE_2D, SWISS_3D, SWISS_3D_NOISE, ROT_10D_NOISE)

CLASS_COUNTS = {TWO_ARCS: 2, THREE_SPIRALS: 3, THREE_RINGS: 5, FOUR_GAUSSIANS: 4}

# Versioned constants table. Noise sigmas are per family; the rest pins
# the geometry so runs are reproducible. Overridable via the experiment
# config ("constants" key); values merged over these defaults.
GEOMETRY_DEFAULTS = {
    "version": 1,
    TWO_ARCS: {
        "radius": 1.0,
        "second_center": [1.0, 0.5],
        "noise_sigma": {"low": 0.05, "medium": 0.12, "high": 0.20},
    },
    THREE_SPIRALS: {
        "pitch": 1.0,
        "theta_start": float(np.pi / 2),
        "theta_end": float(2 * np.pi),
        "noise_sigma": {"low": 0.015, "medium": 0.04, "high": 0.07},
    },
    THREE_RINGS: {
        "disk_radius": 1.0,
        "ring_radii": [2.2, 3.4],
        "gap_radians": 0.3,
        "noise_sigma": {"low": 0.08, "medium": 0.16, "high": 0.24},
    },
    FOUR_GAUSSIANS: {
        "side": 10.0,
        "sigma_small": 0.5,
        "sigma_large": 1.5,
    },
    "embedding": {
        "swiss_angle_start": float(1.5 * np.pi),
        "swiss_angle_span": float(2 * np.pi),
        "noise_diameter_fraction": 0.005,
    },
}

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


class IdxFormatError(ValueError):
    """A file does not conform to the IDX binary layout."""


class IdxMagicError(IdxFormatError):
    pass


class IdxTruncatedError(IdxFormatError):
    pass


class IdxCountMismatchError(IdxFormatError):
    pass


def merged_constants(overrides: dict | None) -> dict:
    """GEOMETRY_DEFAULTS with a (possibly nested) override dict applied."""
    if not overrides:
        return GEOMETRY_DEFAULTS

    def merge(base, over):
        out = dict(base)
        for key, val in over.items():
            if isinstance(val, dict) and isinstance(out.get(key), dict):
                out[key] = merge(out[key], val)
            else:
                out[key] = val
        return out

    return merge(GEOMETRY_DEFAULTS, overrides)


@dataclass(frozen=True)
class DatasetSpec:
    """One generated dataset: family, size, noise, embedding, seed."""

    family: str
    n_per_cluster: int = 100
    noise: str | float = "low"
    embedding: str = PLANE_2D
    embed_noise_sigma: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.embedding not in EMBEDDINGS:
            raise ValueError(f"unknown embedding {self.embedding!r}; expected one of {EMBEDDINGS}")
        if self.n_per_cluster < 10:
            raise ValueError("n_per_cluster must be at least 10")
        if isinstance(self.noise, str):
            if self.noise not in ("low", "medium", "high"):
                raise ValueError("noise must be low/medium/high or an explicit sigma")
        elif self.noise < 0:
            raise ValueError("noise sigma must be nonnegative")

    @property
    def n_classes(self) -> int:
        return CLASS_COUNTS[self.family]


def resolve_noise_sigma(spec: DatasetSpec, constants: dict) -> float:
    if isinstance(spec.noise, str):
        table = constants[spec.family].get("noise_sigma")
        if table is None:
            raise ValueError(f"{spec.family} takes no named noise level")
        return float(table[spec.noise])
    return float(spec.noise)


def gen_two_arcs(spec: DatasetSpec, constants: dict | None = None) -> PointSet:
    """Two interleaved half-circle arcs with radial Gaussian noise."""
    constants = merged_constants(constants)
    geo = constants[TWO_ARCS]
    sigma = resolve_noise_sigma(spec, constants)
    rng = make_rng(spec.seed)
    n = spec.n_per_cluster

    theta_upper = rng.uniform(0.0, np.pi, n)
    theta_lower = rng.uniform(np.pi, 2 * np.pi, n)
    r_upper = geo["radius"] + rng.normal(0.0, sigma, n) if sigma > 0 else np.full(n, geo["radius"])
    r_lower = geo["radius"] + rng.normal(0.0, sigma, n) if sigma > 0 else np.full(n, geo["radius"])
    cx, cy = geo["second_center"]
    upper = np.column_stack([r_upper * np.cos(theta_upper), r_upper * np.sin(theta_upper)])
    lower = np.column_stack([cx + r_lower * np.cos(theta_lower), cy + r_lower * np.sin(theta_lower)])
    points = np.vstack([upper, lower])
    labels = np.repeat([0, 1], n)
    return PointSet(points=points, labels=labels, seed=spec.seed)


def gen_three_spirals(spec: DatasetSpec, constants: dict | None = None) -> PointSet:
    """Three phase-shifted Archimedean spirals, radial noise growing with
    the radius, so density thins toward the outside."""
    constants = merged_constants(constants)
    geo = constants[THREE_SPIRALS]
    sigma = resolve_noise_sigma(spec, constants)
    rng = make_rng(spec.seed)
    n = spec.n_per_cluster

    chunks, labels = [], []
    for arm in range(3):
        theta = rng.uniform(geo["theta_start"], geo["theta_end"], n)
        r = geo["pitch"] * theta
        if sigma > 0:
            r = r * (1.0 + rng.normal(0.0, sigma, n))
        phase = arm * 2 * np.pi / 3
        chunks.append(np.column_stack([r * np.cos(theta + phase), r * np.sin(theta + phase)]))
        labels.append(np.full(n, arm))
    return PointSet(points=np.vstack(chunks), labels=np.concatenate(labels), seed=spec.seed)


def gen_three_rings(spec: DatasetSpec, constants: dict | None = None) -> PointSet:
    """A uniform disk inside two concentric rings; each ring is split into
    two half-arcs by an angular gap, giving five clusters of different
    (but internally uniform) densities."""
    constants = merged_constants(constants)
    geo = constants[THREE_RINGS]
    sigma = resolve_noise_sigma(spec, constants)
    rng = make_rng(spec.seed)
    n = spec.n_per_cluster
    gap = geo["gap_radians"]

    chunks, labels = [], []
    r_disk = geo["disk_radius"] * np.sqrt(rng.uniform(0.0, 1.0, n))
    theta_disk = rng.uniform(0.0, 2 * np.pi, n)
    chunks.append(np.column_stack([r_disk * np.cos(theta_disk), r_disk * np.sin(theta_disk)]))
    labels.append(np.zeros(n))

    label = 1
    for radius in geo["ring_radii"]:
        for half in range(2):
            theta = rng.uniform(half * np.pi + gap / 2, (half + 1) * np.pi - gap / 2, n)
            r = radius + (rng.normal(0.0, sigma, n) if sigma > 0 else 0.0)
            chunks.append(np.column_stack([r * np.cos(theta), r * np.sin(theta)]))
            labels.append(np.full(n, label))
            label += 1
    return PointSet(points=np.vstack(chunks), labels=np.concatenate(labels), seed=spec.seed)


def gen_four_gaussians(spec: DatasetSpec, constants: dict | None = None) -> PointSet:
    """Four isotropic Gaussians at square corners, two tight and two three
    times as spread, well separated."""
    constants = merged_constants(constants)
    geo = constants[FOUR_GAUSSIANS]
    rng = make_rng(spec.seed)
    n = spec.n_per_cluster
    side = geo["side"]

    centers = np.array([[0.0, 0.0], [side, 0.0], [0.0, side], [side, side]])
    sigmas = [geo["sigma_small"], geo["sigma_small"], geo["sigma_large"], geo["sigma_large"]]
    chunks = [c + rng.normal(0.0, s, (n, 2)) for c, s in zip(centers, sigmas)]
    labels = np.repeat(np.arange(4), n)
    return PointSet(points=np.vstack(chunks), labels=labels, seed=spec.seed)


_GENERATORS = {
    TWO_ARCS: gen_two_arcs,
    THREE_SPIRALS: gen_three_spirals,
    THREE_RINGS: gen_three_rings,
    FOUR_GAUSSIANS: gen_four_gaussians,
}


def _unit_spiral_arclength(phi):
    return 0.5 * (phi * np.sqrt(1.0 + phi * phi) + np.arcsinh(phi))


def _coil_parameters(x: np.ndarray, constants: dict):
    emb = constants["embedding"]
    phi0 = emb["swiss_angle_start"]
    phi1 = phi0 + emb["swiss_angle_span"]
    width = float(x.max() - x.min())
    unit_length = _unit_spiral_arclength(phi1) - _unit_spiral_arclength(phi0)
    coil_scale = width / unit_length if width > 0 else 1.0
    return phi0, phi1, coil_scale


def _coil_angle(x: np.ndarray, phi0: float, phi1: float, coil_scale: float) -> np.ndarray:
    """Invert the spiral arc length so each x lands at its own arc-length
    position along the coil (the map is an isometry of the surface)."""
    target = _unit_spiral_arclength(phi0) + (x - x.min()) / coil_scale
    grid = np.linspace(phi0, phi1, 512)
    phi = np.interp(target, _unit_spiral_arclength(grid), grid)
    for _ in range(60):
        residual = _unit_spiral_arclength(phi) - target
        if np.max(np.abs(residual)) < 1e-13:
            break
        phi = phi - residual / np.sqrt(1.0 + phi * phi)
    return phi


def _coil_points(points2d: np.ndarray, constants: dict) -> tuple[np.ndarray, np.ndarray, float]:
    x, y = points2d[:, 0], points2d[:, 1]
    phi0, phi1, coil_scale = _coil_parameters(x, constants)
    phi = _coil_angle(x, phi0, phi1, coil_scale)
    coiled = np.column_stack([coil_scale * phi * np.cos(phi), y, coil_scale * phi * np.sin(phi)])
    return coiled, phi, coil_scale


def _surface_normals(phi: np.ndarray) -> np.ndarray:
    tx = np.cos(phi) - phi * np.sin(phi)
    tz = np.sin(phi) + phi * np.cos(phi)
    norm = np.sqrt(tx * tx + tz * tz)
    return np.column_stack([-tz / norm, np.zeros_like(phi), tx / norm])


def _random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    gauss = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(gauss)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q


def data_diameter(points: np.ndarray) -> float:
    return float(cdist(points, points).max())


def embed(ps: PointSet, embedding: str, embed_noise_sigma: float | None = None,
          rng=None, constants: dict | None = None) -> PointSet:
    """Embed a 2d point set: identity, coil onto a 3d spiral surface
    (arc-length preserving, y kept as the roll axis), coil plus Gaussian
    drift along the surface normal, or coil zero-padded to 10d, randomly
    rotated, with isotropic Gaussian noise.

    embed_noise_sigma=None scales the noise to a fixed fraction of the
    clean embedded diameter.
    """
    if embedding not in EMBEDDINGS:
        raise ValueError(f"unknown embedding {embedding!r}")
    if embedding == PLANE_2D:
        return ps
    if ps.n_dims != 2:
        raise ValueError(f"coiled embeddings need 2d input, got {ps.n_dims}d")
    constants = merged_constants(constants)
    rng = as_generator(rng)

    coiled, phi, _ = _coil_points(ps.points, constants)
    if embedding == SWISS_3D:
        return PointSet(points=coiled, labels=ps.labels, seed=ps.seed)

    if embed_noise_sigma is None:
        fraction = constants["embedding"]["noise_diameter_fraction"]
        embed_noise_sigma = fraction * data_diameter(coiled)

    if embedding == SWISS_3D_NOISE:
        drift = rng.normal(0.0, embed_noise_sigma, len(coiled))
        points = coiled + drift[:, None] * _surface_normals(phi)
        return PointSet(points=points, labels=ps.labels, seed=ps.seed)

    padded = np.zeros((len(coiled), 10))
    padded[:, :3] = coiled
    rotation = _random_rotation(10, rng)
    points = padded @ rotation
    if embed_noise_sigma > 0:
        points = points + rng.normal(0.0, embed_noise_sigma, points.shape)
    return PointSet(points=points, labels=ps.labels, seed=ps.seed)


def generate_dataset(spec: DatasetSpec, constants: dict | None = None) -> PointSet:
    """Generate the 2d family then apply the requested embedding.

    Fully deterministic in spec.seed: the planar sample and the embedding
    draw from independent streams of the same seed.
    """
    constants = merged_constants(constants)
    flat = _GENERATORS[spec.family](spec, constants)
    if spec.embedding == PLANE_2D:
        return flat
    return embed(flat, spec.embedding, spec.embed_noise_sigma,
                 rng=make_rng(spec.seed, stream=1), constants=constants)


def _read_idx(path) -> bytes:
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rb") as f:
        return f.read()


def load_mnist_idx(images_path, labels_path) -> PointSet:
    """Load an IDX image/label file pair into a flat point set.

    Big-endian headers; pixels kept as raw 0-255 values, one 784-long row
    per image (no scaling or other preprocessing). `.gz` paths are
    decompressed transparently.
    """
    img = _read_idx(images_path)
    if len(img) < 16:
        raise IdxTruncatedError(f"{images_path}: too short for an image header")
    magic, count, rows, cols = struct.unpack_from(">IIII", img, 0)
    if magic != IDX_IMAGE_MAGIC:
        raise IdxMagicError(f"{images_path}: bad image magic {magic:#010x}")
    expected = 16 + count * rows * cols
    if len(img) != expected:
        raise IdxTruncatedError(
            f"{images_path}: expected {expected} bytes for {count} images, got {len(img)}")
    points = np.frombuffer(img, dtype=np.uint8, count=count * rows * cols, offset=16)
    points = points.reshape(count, rows * cols).astype(np.float64)

    lab = _read_idx(labels_path)
    if len(lab) < 8:
        raise IdxTruncatedError(f"{labels_path}: too short for a label header")
    magic, lab_count = struct.unpack_from(">II", lab, 0)
    if magic != IDX_LABEL_MAGIC:
        raise IdxMagicError(f"{labels_path}: bad label magic {magic:#010x}")
    if len(lab) != 8 + lab_count:
        raise IdxTruncatedError(
            f"{labels_path}: expected {8 + lab_count} bytes for {lab_count} labels, got {len(lab)}")
    if lab_count != count:
        raise IdxCountMismatchError(
            f"image/label counts differ: {count} images vs {lab_count} labels")
    raw = np.frombuffer(lab, dtype=np.uint8, offset=8).astype(np.int64)
    # dense relabeling (identity for the official files, which carry 0-9)
    _, labels = np.unique(raw, return_inverse=True)
    return PointSet(points=points, labels=labels)


def sample_digit_subsets(ps: PointSet, digits, per_class: int, repeats: int,
                         rng=None) -> list[PointSet]:
    """`repeats` disjoint subsets, each with exactly per_class points per
    requested class, labels remapped to 0..len(digits)-1 in given order.

    Disjointness comes from partitioning one seeded shuffle per class.
    """
    if ps.labels is None:
        raise ValueError("point set has no labels to sample by")
    rng = as_generator(rng)
    digits = list(digits)
    pools = {}
    for d in digits:
        idx = np.flatnonzero(ps.labels == d)
        if len(idx) < per_class * repeats:
            raise ValueError(
                f"class {d} has {len(idx)} points; need {per_class * repeats} "
                f"for {repeats} disjoint subsets of {per_class}")
        pools[d] = rng.permutation(idx)

    subsets = []
    for r in range(repeats):
        sel, labels = [], []
        for new_label, d in enumerate(digits):
            block = pools[d][r * per_class : (r + 1) * per_class]
            sel.append(block)
            labels.append(np.full(per_class, new_label))
        sel = np.concatenate(sel)
        subsets.append(PointSet(points=ps.points[sel], labels=np.concatenate(labels)))
    return subsets
