"""Tiny SVG emitter for plane covers: sets colored by partition family."""

from __future__ import annotations

import math

from .geometry import Ball, Interval, MorseSet, StarPolytope

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
)


class SvgCanvas:
    def __init__(self, scale: float = 400.0):
        self.scale = scale
        self.min_x = self.min_y = math.inf
        self.max_x = self.max_y = -math.inf
        self.items: list[str] = []

    def _grow(self, x: float, y: float):
        self.min_x = min(self.min_x, x)
        self.max_x = max(self.max_x, x)
        self.min_y = min(self.min_y, y)
        self.max_y = max(self.max_y, y)

    def circle(self, cx: float, cy: float, r: float, color: str, alpha: float = 0.5):
        self._grow(cx - r, cy - r)
        self._grow(cx + r, cy + r)
        self.items.append(
            f'<circle cx="{cx:.6f}" cy="{cy:.6f}" r="{r:.6f}" '
            f'fill="{color}" fill-opacity="{alpha}" stroke="{color}"/>')

    def rect(self, x0: float, y0: float, x1: float, y1: float, color: str,
             alpha: float = 0.5):
        self._grow(x0, y0)
        self._grow(x1, y1)
        self.items.append(
            f'<rect x="{x0:.6f}" y="{y0:.6f}" width="{x1 - x0:.6f}" '
            f'height="{y1 - y0:.6f}" fill="{color}" fill-opacity="{alpha}" '
            f'stroke="{color}"/>')

    def polygon(self, pts, color: str, alpha: float = 0.5):
        for x, y in pts:
            self._grow(x, y)
        joined = " ".join(f"{x:.6f},{y:.6f}" for x, y in pts)
        self.items.append(
            f'<polygon points="{joined}" fill="{color}" '
            f'fill-opacity="{alpha}" stroke="{color}"/>')

    def point(self, x: float, y: float, r: float = 0.004, color: str = "#000000"):
        self._grow(x, y)
        self.items.append(
            f'<circle cx="{x:.6f}" cy="{y:.6f}" r="{r:.6f}" fill="{color}"/>')

    def render(self) -> str:
        if not self.items:
            self.min_x = self.min_y = 0.0
            self.max_x = self.max_y = 1.0
        pad = 0.05 * max(self.max_x - self.min_x, self.max_y - self.min_y, 1e-9)
        x0, y0 = self.min_x - pad, self.min_y - pad
        w = self.max_x - self.min_x + 2 * pad
        h = self.max_y - self.min_y + 2 * pad
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{self.scale * w:.0f}" height="{self.scale * h:.0f}" '
            f'viewBox="{x0:.6f} {y0:.6f} {w:.6f} {h:.6f}">\n')
        return head + "\n".join(self.items) + "\n</svg>\n"

    def save(self, path: str):
        with open(path, "w") as fh:
            fh.write(self.render())


def family_color(j: int) -> str:
    return _PALETTE[j % len(_PALETTE)]


def draw_set(canvas: SvgCanvas, S: MorseSet, color: str, alpha: float = 0.45):
    sh = S.shape
    if isinstance(sh, Ball):
        if S.space.norm in ("linf", "wlinf"):
            ex = sh.radius * S.space.axis_extent(0)
            ey = sh.radius * S.space.axis_extent(1)
            canvas.rect(sh.center[0] - ex, sh.center[1] - ey,
                        sh.center[0] + ex, sh.center[1] + ey, color, alpha)
        elif S.space.norm == "l1":
            c, r = sh.center, sh.radius
            canvas.polygon([(c[0] + r, c[1]), (c[0], c[1] + r),
                            (c[0] - r, c[1]), (c[0], c[1] - r)], color, alpha)
        else:
            canvas.circle(sh.center[0], sh.center[1], sh.radius, color, alpha)
    elif isinstance(sh, Interval):
        canvas.rect(sh.anchor[0], sh.anchor[1],
                    sh.anchor[0] + sh.edges[0], sh.anchor[1] + sh.edges[1],
                    color, alpha)
    elif isinstance(sh, StarPolytope):
        canvas.polygon(list(sh.vertices), color, alpha)
    canvas.point(S.tag[0], S.tag[1])


def render_partition(sets: list[MorseSet], families: list[list[int]],
                     path: str | None = None) -> str:
    """Draw a partitioned plane cover, one color per disjoint family."""
    canvas = SvgCanvas()
    for j, fam in enumerate(families):
        color = family_color(j)
        for i in fam:
            draw_set(canvas, sets[i], color)
    text = canvas.render()
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text
