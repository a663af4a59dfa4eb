"""Plain SVG 1.1 drawings of extended partitions and hyperbolic covers."""

from __future__ import annotations

import numpy as np

from .geom import EmptySetError, PolygonV, polygon_from_hrep

PALETTE = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
           "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _points(V) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in V)


class _Canvas:
    def __init__(self, lo, hi, size: int = 600):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.size = size
        self.items: list[str] = []

    def header(self) -> str:
        w, h = self.hi - self.lo
        # flip y so the drawing uses mathematical orientation
        return (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{self.size}" height="{self.size}" '
                f'viewBox="{_fmt(self.lo[0])} {_fmt(-self.hi[1])} {_fmt(w)} {_fmt(h)}">\n'
                f'<g transform="scale(1,-1)">\n')

    def render(self) -> str:
        return self.header() + "\n".join(self.items) + "\n</g>\n</svg>\n"

    def stroke(self) -> float:
        return float(np.max(self.hi - self.lo)) / 400


def extension_svg(B: PolygonV, extended, body_cells, rays=None, homothets=(), box=None) -> str:
    """Cells clipped to ``box``, the body, the final rays and one inscribed homothet per cell."""
    if box is None:
        c = B.vertices.mean(axis=0)
        span = float(np.max(B.vertices.max(axis=0) - B.vertices.min(axis=0)))
        box = (c - 1.5 * span, c + 1.5 * span)
    cv = _Canvas(*box)
    sw = cv.stroke()
    for i, cell in enumerate(extended.cells):
        try:
            poly = polygon_from_hrep(cell, box)
        except EmptySetError:
            continue
        cv.items.append(f'<polygon class="cell" data-index="{i}" points="{_points(poly.vertices)}" '
                        f'fill="{PALETTE[i % len(PALETTE)]}" fill-opacity="0.35" '
                        f'stroke="#333" stroke-width="{_fmt(sw)}"/>')
    cv.items.append(f'<polygon class="body" points="{_points(B.vertices)}" fill="none" '
                    f'stroke="#000" stroke-width="{_fmt(3 * sw)}"/>')
    if rays is not None:
        far = 4.0 * float(np.max(cv.hi - cv.lo))
        for i in range(rays.n):
            o = rays.origins[i]
            L = rays.lengths[i] if np.isfinite(rays.lengths[i]) else far
            e = o + L * rays.directions[i]
            cv.items.append(f'<line class="ray" x1="{_fmt(o[0])}" y1="{_fmt(o[1])}" '
                            f'x2="{_fmt(e[0])}" y2="{_fmt(e[1])}" stroke="#c00" '
                            f'stroke-width="{_fmt(1.5 * sw)}"/>')
        for _, _, p in rays.trims:
            cv.items.append(f'<circle class="trim" cx="{_fmt(p[0])}" cy="{_fmt(p[1])}" '
                            f'r="{_fmt(4 * sw)}" fill="#c00"/>')
    for h, t in homothets:
        V = h * B.vertices + t
        cv.items.append(f'<polygon class="homothet" points="{_points(V)}" fill="none" '
                        f'stroke="#222" stroke-dasharray="{_fmt(4 * sw)},{_fmt(2 * sw)}" '
                        f'stroke-width="{_fmt(sw)}"/>')
    return cv.render()


def hyperbolic_svg(rho: float, regions, disks) -> str:
    """Two shapes as paths, their inscribed disks dashed, and the outline of Omega.

    ``disks`` holds (euclidean centre, euclidean radius) pairs in the Poincare model.
    """
    from .noneuclid.hyperbolic import boundary_trace, radius_to_euclid

    cv = _Canvas((-1.05, -1.05), (1.05, 1.05))
    sw = cv.stroke()
    R = radius_to_euclid(rho)
    cv.items.append(f'<circle class="omega" cx="0" cy="0" r="{_fmt(R)}" fill="none" '
                    f'stroke="#000" stroke-width="{_fmt(2 * sw)}"/>')
    for i, reg in enumerate(regions):
        V = boundary_trace(reg)
        d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in V) + " Z"
        cv.items.append(f'<path class="shape" d="{d}" fill="{PALETTE[i]}" fill-opacity="0.25" '
                        f'stroke="{PALETTE[i]}" stroke-width="{_fmt(2 * sw)}"/>')
    for i, (c, r) in enumerate(disks):
        cv.items.append(f'<circle class="inscribed" cx="{_fmt(c[0])}" cy="{_fmt(c[1])}" '
                        f'r="{_fmt(r)}" fill="none" stroke="{PALETTE[i]}" '
                        f'stroke-dasharray="{_fmt(6 * sw)},{_fmt(4 * sw)}" '
                        f'stroke-width="{_fmt(2 * sw)}"/>')
    return cv.render()


__all__ = ["extension_svg", "hyperbolic_svg"]
