"""Reconstruction domain, electrode placement and uniform z-grids.

Two coordinate frames are used throughout the package:

* the *physical* frame in which domains are specified (millimetres for the
  chest geometry), and
* the *model* frame obtained by rescaling the boundary so its perimeter is
  2*pi.  A disc of perimeter 2*pi*rho maps onto the unit disc.

All scattering / CGO computations happen in the model frame, where the
complex frequency k and positions z multiply each other in exponentials; the
conversion factor is stored on the Domain.  The admittivity itself is scale
invariant in two dimensions, so its values (S/m) carry over unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import Polygon

MODEL_PERIMETER = 2.0 * np.pi

# Closed chest-like outline as complex Fourier descriptors z(t) = sum c_m e^{imt}.
# Slightly elliptic, flattened dorsally; fixed here so chest runs are reproducible.
CHEST_DESCRIPTORS = {1: 0.96 + 0.0j, -1: 0.16 + 0.0j, 2: -0.03j, -2: -0.03j}


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    """Closed simply connected reconstruction domain.

    boundary : (n, ) complex vertices, counterclockwise, physical units,
        equispaced in arc length; the curve closes from the last vertex back
        to the first.
    perimeter : physical boundary length.
    kind : 'disc' | 'chest' | 'custom-polygon'.
    """

    boundary: np.ndarray
    perimeter: float
    kind: str

    @property
    def scale(self) -> float:
        """Multiplier taking physical coordinates to the model frame."""
        return MODEL_PERIMETER / self.perimeter

    @property
    def model_boundary(self) -> np.ndarray:
        return self.boundary * self.scale

    def polygon(self, frame: str = "physical") -> Polygon:
        pts = self.boundary if frame == "physical" else self.model_boundary
        return Polygon(np.column_stack([pts.real, pts.imag]))


@dataclass(frozen=True)
class ElectrodeLayout:
    """L boundary electrodes, equispaced in arc length.

    centers_s : arc-length positions of electrode centers (physical units),
        center l at (l+1) * perimeter / L.
    length, height : electrode dimensions (physical units); the height only
        enters area bookkeeping, the 2-D model is solved per unit height.
    contact_impedance : complex z_l, one per electrode (model units).
    """

    count: int
    centers_s: np.ndarray
    length: float
    height: float
    contact_impedance: np.ndarray

    @property
    def arcs(self) -> np.ndarray:
        """(L, 2) arc-length intervals [start, end] of the electrodes."""
        half = self.length / 2.0
        return np.column_stack([self.centers_s - half, self.centers_s + half])


@dataclass(frozen=True)
class ZGrid:
    """Uniform 2^m x 2^m grid covering the padded domain in the model frame.

    Half-offset lattice: cell centers at origin + (i + 0.5) h, so the exact
    origin is never a sample point.  omega_mask marks cells inside the domain,
    omega_plus_mask cells inside the padded domain used for CGO fields.
    """

    m: int
    step: float
    origin: complex
    omega_mask: np.ndarray
    omega_plus_mask: np.ndarray

    @property
    def n(self) -> int:
        return 2**self.m

    @property
    def points(self) -> np.ndarray:
        ax = self.origin.real + (np.arange(self.n) + 0.5) * self.step
        ay = self.origin.imag + (np.arange(self.n) + 0.5) * self.step
        gx, gy = np.meshgrid(ax, ay)
        return gx + 1j * gy


def _resample_closed_curve(pts: np.ndarray, count: int) -> np.ndarray:
    """Resample a closed polyline to `count` vertices equispaced in arc length."""
    closed = np.append(pts, pts[0])
    seg = np.abs(np.diff(closed))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    targets = np.arange(count) * total / count
    out = np.empty(count, dtype=complex)
    j = 0
    for i, t in enumerate(targets):
        while s[j + 1] < t:
            j += 1
        frac = (t - s[j]) / (s[j + 1] - s[j])
        out[i] = closed[j] + frac * (closed[j + 1] - closed[j])
    return out


def _polyline_perimeter(pts: np.ndarray) -> float:
    closed = np.append(pts, pts[0])
    return float(np.sum(np.abs(np.diff(closed))))


def build_domain(kind: str, perimeter: float, vertex_count: int = 512) -> Domain:
    """Construct a disc or chest domain of the requested perimeter.

    The chest outline is the package's fixed Fourier-descriptor curve, scaled
    uniformly so the resampled polyline has the requested perimeter.  Vertices
    are equispaced in arc length, counterclockwise.
    """
    if perimeter <= 0:
        raise GeometryError("perimeter must be positive")
    if vertex_count < 16:
        raise GeometryError("need at least 16 boundary vertices")
    if kind == "disc":
        radius = perimeter / (2 * np.pi)
        t = 2 * np.pi * np.arange(vertex_count) / vertex_count
        pts = radius * np.exp(1j * t)
        # polygon perimeter is slightly below 2*pi*r; renormalize
        pts *= perimeter / _polyline_perimeter(pts)
        return Domain(boundary=pts, perimeter=_polyline_perimeter(pts), kind="disc")
    if kind == "chest":
        t = 2 * np.pi * np.arange(8 * vertex_count) / (8 * vertex_count)
        raw = sum(c * np.exp(1j * m * t) for m, c in CHEST_DESCRIPTORS.items())
        raw = _resample_closed_curve(raw, vertex_count)
        raw *= perimeter / _polyline_perimeter(raw)
        raw = _resample_closed_curve(raw, vertex_count)
        raw *= perimeter / _polyline_perimeter(raw)
        return Domain(boundary=raw, perimeter=_polyline_perimeter(raw), kind="chest")
    raise GeometryError(f"unsupported domain kind: {kind!r}")


def build_custom_domain(vertices: np.ndarray, vertex_count: int = 512) -> Domain:
    """Domain from user vertices (complex, counterclockwise), resampled in arc length."""
    pts = np.asarray(vertices, dtype=complex)
    if pts.size < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    area = 0.5 * np.sum(np.imag(np.conj(pts) * np.roll(pts, -1)))
    if area < 0:
        raise GeometryError("boundary must be counterclockwise")
    poly = Polygon(np.column_stack([pts.real, pts.imag]))
    if not poly.is_valid:
        raise GeometryError("boundary is self-intersecting")
    pts = _resample_closed_curve(pts, vertex_count)
    return Domain(boundary=pts, perimeter=_polyline_perimeter(pts), kind="custom-polygon")


def place_electrodes(
    domain: Domain,
    count: int,
    length: float,
    height: float,
    z_contact: complex,
) -> ElectrodeLayout:
    """Equispaced electrodes centered at arc positions (l+1) * P / L, l = 0..L-1.

    Lengths are physical (same units as the domain boundary).  Fails if the
    electrodes would overlap or if the count is odd (the trigonometric pattern
    split needs L/2).
    """
    if count % 2 != 0:
        raise GeometryError("electrode count must be even")
    if count * length >= domain.perimeter:
        raise GeometryError(
            f"electrodes overlap: {count} x {length} exceeds perimeter {domain.perimeter:.6g}"
        )
    if length <= 0 or height <= 0:
        raise GeometryError("electrode dimensions must be positive")
    centers = (np.arange(count) + 1.0) * domain.perimeter / count
    z = np.full(count, complex(z_contact))
    return ElectrodeLayout(
        count=count, centers_s=centers, length=float(length), height=float(height),
        contact_impedance=z,
    )


def boundary_point(domain: Domain, s, frame: str = "physical") -> np.ndarray:
    """Point(s) on the boundary at arc length s (vectorized, periodic)."""
    scale = 1.0 if frame == "physical" else domain.scale
    closed = np.append(domain.boundary, domain.boundary[0])
    seg = np.abs(np.diff(closed))
    knots = np.concatenate([[0.0], np.cumsum(seg)])
    s = np.mod(np.asarray(s, dtype=float), knots[-1])
    idx = np.clip(np.searchsorted(knots, s, side="right") - 1, 0, len(seg) - 1)
    frac = (s - knots[idx]) / seg[idx]
    out = closed[idx] + frac * (closed[idx + 1] - closed[idx])
    return out * scale


def build_zgrid(domain: Domain, m: int, padding_fraction: float = 0.05) -> ZGrid:
    """Square 2^m x 2^m model-frame grid enclosing the padded domain.

    The padded domain is the dilation of the model-frame polygon by
    padding_fraction of its diameter; the grid keeps at least two cells of
    margin around it.
    """
    if not 5 <= m <= 10:
        raise GeometryError("m must be between 5 and 10")
    if padding_fraction < 0:
        raise GeometryError("padding_fraction must be nonnegative")
    n = 2**m
    poly = domain.polygon(frame="model")
    minx, miny, maxx, maxy = poly.bounds
    diameter = float(np.hypot(maxx - minx, maxy - miny))
    pad = padding_fraction * diameter
    poly_plus = poly.buffer(pad, quad_segs=32) if pad > 0 else poly
    bx0, by0, bx1, by1 = poly_plus.bounds
    extent = max(bx1 - bx0, by1 - by0)
    side = extent / (1.0 - 4.0 / n)
    step = side / n
    cx, cy = (bx0 + bx1) / 2.0, (by0 + by1) / 2.0
    origin = complex(cx - side / 2.0, cy - side / 2.0)
    pts = ZGrid(m=m, step=step, origin=origin,
                omega_mask=np.empty(0), omega_plus_mask=np.empty(0)).points
    inside = shapely.contains_xy(poly, pts.real.ravel(), pts.imag.ravel()).reshape(n, n)
    inside_plus = shapely.contains_xy(
        poly_plus, pts.real.ravel(), pts.imag.ravel()
    ).reshape(n, n)
    inside_plus |= inside
    return ZGrid(m=m, step=step, origin=origin,
                 omega_mask=inside, omega_plus_mask=inside_plus)
