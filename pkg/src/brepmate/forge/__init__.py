from .shapes import (
    make_box,
    make_capped_cone,
    make_capped_cylinder,
    make_donut,
    make_plate_with_holes,
    make_tube,
    part_moments,
)

__all__ = [
    "make_box", "make_capped_cone", "make_capped_cylinder", "make_donut",
    "make_plate_with_holes", "make_tube", "part_moments",
]
