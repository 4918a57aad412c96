"""brepmate: mate-location and mate-type suggestion for BREP CAD parts."""

__version__ = "0.1.0"
