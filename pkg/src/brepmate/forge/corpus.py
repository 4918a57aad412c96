"""Seeded synthetic assembly families with ground-truth mates.

Six two-part families: a peg through a plate hole (revolute or fastened
depending on how far the peg protrudes), stacked blocks (fastened when
the upper block is smaller, planar when it overhangs), hinge leaves with
aligned knuckle holes (revolute), a shaft in a bushing (cylindrical), a
slider against a rail face (slider), and facing plates (parallel).
Instance b is posed by aligning the ground-truth frames, so every
assembly ships assembled. All dimensions are drawn from a single seeded
stream; identical seeds and counts reproduce byte-identical corpora.
"""

from __future__ import annotations

import numpy as np

from ..brep.model import Assembly, Instance, Mate, McfRef, Part
from ..geometry import align_transform
from ..mcf import resolve_frame
from .shapes import (
    make_box,
    make_capped_cylinder,
    make_plate_with_holes,
    make_tube,
)

FAMILIES = ("plate_peg", "block_stack", "hinge", "shaft_bushing", "rail_slider", "offset_plates")

MIN_FACES = 3
MAX_FACES = 200

_DOF_NOTES = {
    "fastened": "all six degrees of freedom locked",
    "revolute": "rotation about the shared z-axis",
    "planar": "in-plane translation and rotation about z",
    "slider": "translation along one in-plane axis",
    "cylindrical": "rotation about and translation along the z-axis",
    "parallel": "orientations locked, translation free",
}


def _mate_and_pose(part_a: Part, part_b: Part, mcf_a: McfRef, mcf_b: McfRef,
                   mate_type: str) -> tuple[Mate, np.ndarray]:
    frame_a = resolve_frame(part_a, mcf_a.origin_ref, mcf_a.origin_type, mcf_a.orient_ref)
    frame_b = resolve_frame(part_b, mcf_b.origin_ref, mcf_b.origin_type, mcf_b.orient_ref)
    mate = Mate(a="ia", b="ib", mcf_a=mcf_a, mcf_b=mcf_b, mate_type=mate_type,
                dof_note=_DOF_NOTES[mate_type])
    return mate, align_transform(frame_a, frame_b)


def _hole_positions(rng, w, d, radii):
    """Non-overlapping hole centers inside the plate margin."""
    centers = []
    for r in radii:
        margin = r + 0.04
        for _ in range(64):
            c = np.array([rng.uniform(-w / 2 + margin, w / 2 - margin),
                          rng.uniform(-d / 2 + margin, d / 2 - margin)])
            if all(np.linalg.norm(c - prev) > r + pr + 0.02 for prev, pr in centers):
                centers.append((c, r))
                break
        else:
            centers.append((np.array([0.0, 0.0]), r))
    return [(c[0], c[1], r) for c, r in centers]


def _gen_plate_peg(rng, idx: int):
    w = rng.uniform(0.6, 1.2)
    d = rng.uniform(0.6, 1.2)
    t = rng.uniform(0.1, 0.25)
    n_holes = int(rng.integers(1, 4))
    radii = [rng.uniform(0.05, 0.12) for _ in range(n_holes)]
    holes = _hole_positions(rng, w, d, radii)
    plate = make_plate_with_holes(f"plate_peg_{idx:05d}_a", w, d, t, holes)

    k = int(rng.integers(0, n_holes))
    revolute = bool(rng.integers(0, 2))
    # protrusion ratio decides both label and seat: long pegs spin and sit
    # flush with the top face, short pegs are pressed in flush at the bottom
    ratio = rng.uniform(2.3, 3.0) if revolute else rng.uniform(1.0, 1.7)
    peg = make_capped_cylinder(f"plate_peg_{idx:05d}_b", holes[k][2], ratio * t)
    mate_type = "revolute" if revolute else "fastened"
    seat = "top_axis_point" if revolute else "bottom_axis_point"
    mcf_a = McfRef(f"f_hole{k}", seat, f"f_hole{k}")
    mcf_b = McfRef("f_side", seat, "f_side")
    return plate, peg, mcf_a, mcf_b, mate_type


def _gen_block_stack(rng, idx: int):
    w = rng.uniform(0.5, 1.0)
    d = rng.uniform(0.5, 1.0)
    h = rng.uniform(0.2, 0.5)
    bottom = make_box(f"block_stack_{idx:05d}_a", w, d, h)
    planar = bool(rng.integers(0, 2))
    # overhanging top block rests (planar); smaller one is bolted (fastened)
    u = rng.uniform(1.15, 1.5) if planar else rng.uniform(0.5, 0.85)
    top = make_box(f"block_stack_{idx:05d}_b", w * u, d * u, rng.uniform(0.15, 0.4),
                   flip_up=("zmin",))
    mate_type = "planar" if planar else "fastened"
    return bottom, top, McfRef("f_zmax", "centroid", "f_zmax"), McfRef("f_zmin", "centroid", "f_zmin"), mate_type


def _gen_hinge(rng, idx: int):
    leaves = []
    r = rng.uniform(0.04, 0.08)
    for side, sign in (("a", 1.0), ("b", -1.0)):
        w = rng.uniform(0.5, 0.9)
        d = rng.uniform(0.25, 0.5)
        t = rng.uniform(0.06, 0.12)
        hx = sign * (w / 2 - r - 0.04)
        leaves.append(make_plate_with_holes(f"hinge_{idx:05d}_{side}", w, d, t, [(hx, 0.0, r)]))
    mcf = McfRef("f_hole0", "top_axis_point", "f_hole0")
    return leaves[0], leaves[1], mcf, mcf, "revolute"


def _gen_shaft_bushing(rng, idx: int):
    r = rng.uniform(0.06, 0.15)
    length = rng.uniform(0.5, 1.0)
    shaft = make_capped_cylinder(f"shaft_bushing_{idx:05d}_a", r, length)
    bushing = make_tube(f"shaft_bushing_{idx:05d}_b", r * rng.uniform(1.5, 2.2), r,
                        length * rng.uniform(0.3, 0.6))
    mcf_a = McfRef("f_side", "top_axis_point", "f_side")
    mcf_b = McfRef("f_bore", "top_axis_point", "f_bore")
    return shaft, bushing, mcf_a, mcf_b, "cylindrical"


def _gen_rail_slider(rng, idx: int):
    rail = make_box(f"rail_slider_{idx:05d}_a", rng.uniform(0.15, 0.3),
                    rng.uniform(0.8, 1.2), rng.uniform(0.15, 0.3))
    slider = make_box(f"rail_slider_{idx:05d}_b", rng.uniform(0.1, 0.2),
                      rng.uniform(0.15, 0.3), rng.uniform(0.1, 0.25),
                      flip_up=("xmin",))
    return rail, slider, McfRef("f_xmax", "centroid", "f_xmax"), McfRef("f_xmin", "centroid", "f_xmin"), "slider"


def _gen_offset_plates(rng, idx: int):
    base = make_box(f"offset_plates_{idx:05d}_a", rng.uniform(0.8, 1.2),
                    rng.uniform(0.8, 1.2), rng.uniform(0.04, 0.08))
    small = make_box(f"offset_plates_{idx:05d}_b", rng.uniform(0.25, 0.45),
                     rng.uniform(0.25, 0.45), rng.uniform(0.04, 0.08),
                     flip_up=("zmin",))
    return base, small, McfRef("f_zmax", "centroid", "f_zmax"), McfRef("f_zmin", "centroid", "f_zmin"), "parallel"


_GENERATORS = {
    "plate_peg": _gen_plate_peg,
    "block_stack": _gen_block_stack,
    "hinge": _gen_hinge,
    "shaft_bushing": _gen_shaft_bushing,
    "rail_slider": _gen_rail_slider,
    "offset_plates": _gen_offset_plates,
}


def generate_corpus(seed: int, counts: dict[str, int]):
    """Build (parts, assemblies) for the requested per-family counts."""
    unknown = set(counts) - set(FAMILIES)
    if unknown:
        raise ValueError(f"unknown families {sorted(unknown)}")
    rng = np.random.default_rng(seed)
    parts: dict[str, Part] = {}
    assemblies: list[Assembly] = []
    for family in FAMILIES:
        gen = _GENERATORS[family]
        for i in range(counts.get(family, 0)):
            part_a, part_b, mcf_a, mcf_b, mate_type = gen(rng, i)
            if not (MIN_FACES <= len(part_a.faces) <= MAX_FACES
                    and MIN_FACES <= len(part_b.faces) <= MAX_FACES):
                continue
            mate, pose_b = _mate_and_pose(part_a, part_b, mcf_a, mcf_b, mate_type)
            parts[part_a.id] = part_a
            parts[part_b.id] = part_b
            assemblies.append(Assembly(
                id=f"{family}_{i:05d}",
                instances=(Instance("ia", part_a.id, np.eye(4)), Instance("ib", part_b.id, pose_b)),
                mates=(mate,),
            ))
    return parts, assemblies
