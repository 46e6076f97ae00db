"""Chest phantoms: organ regions, admittivity assignment, rasterization.

Region polygons live in the model frame (boundary perimeter 2*pi).  The true
organ boundaries and the deliberately coarsened "approximate" boundaries used
to build spatial priors are shipped as data files; the approximate set is a
perturbed, lower-resolution copy so that prior-informed reconstructions never
see the exact truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import shapely
from shapely.geometry import Polygon

from .geometry import Domain, ZGrid
from .mesh import TriMesh

# Admittivities (S/m) used by the simulated experiments.
DEFAULT_VALUES = {
    "background": 0.8 + 0.4j,
    "left-lung": 0.5 + 0.2j,
    "right-lung": 0.5 + 0.2j,
    "heart": 1.1 + 0.6j,
    "pneumothorax": 0.25 + 0.0j,
    "effusion": 1.1 + 0.6j,
}

REGION_LABELS = ("heart", "left-lung", "right-lung", "pathology", "other")


@dataclass(frozen=True)
class PhantomSpec:
    """Piecewise-constant admittivity: background plus labeled regions.

    regions is an ordered list of (label, vertices, value); later regions
    override earlier ones where they overlap, so pathologies come last.
    Vertices are complex, model frame.
    """

    background: complex
    regions: tuple

    def values_by_label(self) -> dict:
        out = {"background": self.background}
        for label, _, value in self.regions:
            out[label] = value
        return out


def save_regions(path, regions: dict) -> None:
    """Write labeled polygons: `region <label> <n>` then n `x y` lines."""
    with open(path, "w") as f:
        f.write("# labeled polygons, model frame\n")
        for label, verts in regions.items():
            f.write(f"region {label} {len(verts)}\n")
            for z in verts:
                f.write(f"{z.real:.12g} {z.imag:.12g}\n")


def load_regions(path) -> dict:
    lines = [ln for ln in Path(path).read_text().split("\n")
             if ln and not ln.startswith("#")]
    regions: dict[str, np.ndarray] = {}
    i = 0
    while i < len(lines):
        _, label, n = lines[i].split()
        n = int(n)
        pts = np.array([complex(*map(float, lines[i + 1 + j].split()))
                        for j in range(n)])
        regions[label] = pts
        i += 1 + n
    return regions


def _data_file(name: str):
    return resources.files("dbareit.data").joinpath(name)


def chest_organ_regions(which: str = "true") -> dict:
    """Shipped organ polygons; `which` is 'true' or 'prior' (approximate)."""
    fname = {"true": "chest_organs_true.txt", "prior": "chest_organs_prior.txt"}[which]
    with resources.as_file(_data_file(fname)) as p:
        return load_regions(p)


def build_chest_phantom(pathology: str | None, values: dict | None = None) -> PhantomSpec:
    """True chest phantom with an optional pathology in the left lung.

    pathology: 'pneumothorax', 'effusion' or None (healthy).
    """
    vals = dict(DEFAULT_VALUES)
    if values:
        vals.update(values)
    organs = chest_organ_regions("true")
    regions = [
        ("right-lung", organs["right-lung"], vals["right-lung"]),
        ("left-lung", organs["left-lung"], vals["left-lung"]),
        ("heart", organs["heart"], vals["heart"]),
    ]
    if pathology is not None:
        if pathology not in ("pneumothorax", "effusion"):
            raise ValueError(f"unknown pathology {pathology!r}")
        regions.append(("pathology", organs[pathology], vals[pathology]))
    return PhantomSpec(background=vals["background"], regions=tuple(regions))


def homogeneous_phantom(value: complex = 1.0 + 0.0j) -> PhantomSpec:
    return PhantomSpec(background=complex(value), regions=())


def _region_polygons(phantom: PhantomSpec):
    return [(label, Polygon(np.column_stack([v.real, v.imag])), value)
            for label, v, value in phantom.regions]


def rasterize_points(phantom: PhantomSpec, pts: np.ndarray) -> np.ndarray:
    """Admittivity at model-frame points; later regions override earlier ones."""
    out = np.full(pts.shape, phantom.background, dtype=complex)
    for _, poly, value in _region_polygons(phantom):
        inside = shapely.contains_xy(poly, pts.real.ravel(), pts.imag.ravel())
        out.ravel()[inside] = value
    return out


def rasterize_to_triangles(phantom: PhantomSpec, mesh: TriMesh, domain: Domain) -> np.ndarray:
    """Per-triangle admittivity sampled at centroids (mesh is in physical coords)."""
    cent = mesh.triangle_centroids()
    pts = (cent[:, 0] + 1j * cent[:, 1]) * domain.scale
    return rasterize_points(phantom, pts)


def rasterize_to_zgrid(phantom: PhantomSpec, grid: ZGrid) -> np.ndarray:
    """Cell-center admittivity on the z-grid (model frame), background outside."""
    return rasterize_points(phantom, grid.points)


def region_masks(phantom: PhantomSpec, grid: ZGrid) -> dict:
    """Boolean masks per region label, later regions overriding earlier ones."""
    pts = grid.points
    masks: dict[str, np.ndarray] = {}
    claimed = np.zeros(pts.shape, dtype=bool)
    for label, poly, _ in reversed(_region_polygons(phantom)):
        inside = shapely.contains_xy(poly, pts.real.ravel(), pts.imag.ravel()).reshape(pts.shape)
        inside &= grid.omega_mask
        masks[label] = inside & ~claimed
        claimed |= inside
    masks["background"] = grid.omega_mask & ~claimed
    return masks


def masks_from_regions(regions: dict, grid: ZGrid, order=None) -> dict:
    """Masks for a raw label->vertices dict (used by the prior builder)."""
    pts = grid.points
    labels = order if order is not None else list(regions)
    masks: dict[str, np.ndarray] = {}
    claimed = np.zeros(pts.shape, dtype=bool)
    for label in labels:
        poly = Polygon(np.column_stack([regions[label].real, regions[label].imag]))
        inside = shapely.contains_xy(poly, pts.real.ravel(), pts.imag.ravel()).reshape(pts.shape)
        inside &= grid.omega_mask
        masks[label] = inside & ~claimed
        claimed |= inside
    masks["background"] = grid.omega_mask & ~claimed
    return masks
