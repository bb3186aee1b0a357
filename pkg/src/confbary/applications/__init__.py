"""Polygon closure and discrete Douady-Earle extension."""

from .douady_earle import (
    ExtensionGrid,
    SphericalCurve,
    douady_earle_grid,
    douady_earle_point,
    quadrature_circle,
)
from .polygons import ClosedPolygon, OpenPolygon, close_polygon, polygon_to_measure

__all__ = [
    "ClosedPolygon",
    "ExtensionGrid",
    "OpenPolygon",
    "SphericalCurve",
    "close_polygon",
    "douady_earle_grid",
    "douady_earle_point",
    "polygon_to_measure",
    "quadrature_circle",
]
