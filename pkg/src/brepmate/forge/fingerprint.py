"""Part, mate, and assembly deduplication via geometric fingerprints.

A part fingerprint is the entity count per tier plus the quantized
center of mass and inertia tensor of the part (composed from face
summaries). Mates are keyed by their part fingerprints, canonicalized
MCF data, and mate type; assemblies by their multiset of mate keys.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..brep.model import Assembly, Mate, Part
from ..errors import BrepmateError
from ..mcf import resolve_frame
from .shapes import part_moments

DEFAULT_QUANT = 1e-6


@dataclass(frozen=True)
class Fingerprint:
    counts: tuple          # (|F|, |L|, |E|, |V|)
    center_of_mass: tuple  # quantized
    inertia: tuple         # quantized upper triangle (6,)
    quant: float

    def key(self) -> tuple:
        return (self.counts, self.center_of_mass, self.inertia)


def _quantize(values: np.ndarray, q: float) -> tuple:
    return tuple(int(round(float(v) / q)) for v in values)


def fingerprint(part: Part, q: float = DEFAULT_QUANT) -> Fingerprint:
    moments = part_moments(part)
    inertia = np.trace(moments.second) * np.eye(3) - moments.second
    upper = np.array([inertia[0, 0], inertia[0, 1], inertia[0, 2],
                      inertia[1, 1], inertia[1, 2], inertia[2, 2]])
    return Fingerprint(
        counts=(len(part.faces), len(part.loops), len(part.edges), len(part.vertices)),
        center_of_mass=_quantize(moments.com, q),
        inertia=_quantize(upper, q),
        quant=q,
    )


def _canonical_mcf(part: Part, origin_ref: str, origin_type: str, orient_ref: str, q: float):
    """Rename-invariant MCF key: entity kinds, origin type, quantized frame."""
    frame = resolve_frame(part, origin_ref, origin_type, orient_ref)
    return (
        part.entity(origin_ref).function.kind,
        origin_type,
        part.entity(orient_ref).function.kind,
        _quantize(frame.origin, q),
        _quantize(frame.rotation().reshape(-1), q),
    )


def mate_key(mate: Mate, part_a: Part, part_b: Part, q: float = DEFAULT_QUANT) -> tuple:
    """Order-independent mate identity over (parts, MCFs, type)."""
    fp_a = fingerprint(part_a, q).key()
    fp_b = fingerprint(part_b, q).key()
    mcf_a = _canonical_mcf(part_a, mate.mcf_a.origin_ref, mate.mcf_a.origin_type, mate.mcf_a.orient_ref, q)
    mcf_b = _canonical_mcf(part_b, mate.mcf_b.origin_ref, mate.mcf_b.origin_type, mate.mcf_b.orient_ref, q)
    side_a = (fp_a, mcf_a)
    side_b = (fp_b, mcf_b)
    if side_b < side_a:
        side_a, side_b = side_b, side_a
    return (side_a, side_b, mate.mate_type)


@dataclass
class DedupStats:
    parts_in: int = 0
    parts_out: int = 0
    mates_in: int = 0
    mates_out: int = 0
    assemblies_in: int = 0
    assemblies_out: int = 0
    incomplete_mates_removed: int = 0
    duplicate_pair_mates_removed: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def dedup(parts: dict[str, Part], assemblies: list[Assembly],
          q: float = DEFAULT_QUANT):
    """Collapse duplicate parts, mates, and assemblies.

    Returns (unique_parts, unique_mate_keys, unique_assemblies, stats).
    unique_parts maps fingerprint key -> representative Part (first seen);
    unique_assemblies keeps the first assembly per mate multiset.
    Incomplete mates (dangling references) and extra mates on an already
    mated instance pair are dropped and counted.
    """
    stats = DedupStats(parts_in=len(parts), assemblies_in=len(assemblies))

    unique_parts: dict[tuple, Part] = {}
    part_fp: dict[str, tuple] = {}
    for pid in sorted(parts):
        fp = fingerprint(parts[pid], q).key()
        part_fp[pid] = fp
        if fp not in unique_parts:
            unique_parts[fp] = parts[pid]
    stats.parts_out = len(unique_parts)

    unique_mates: dict[tuple, tuple] = {}
    unique_assemblies: dict[frozenset, Assembly] = {}
    for asm in assemblies:
        asm_mate_keys: list[tuple] = []
        seen_pairs: set = set()
        for mate in asm.mates:
            stats.mates_in += 1
            try:
                inst_a = asm.instance(mate.a)
                inst_b = asm.instance(mate.b)
                pa = parts[inst_a.part]
                pb = parts[inst_b.part]
                key = mate_key(mate, pa, pb, q)
            except (KeyError, BrepmateError):
                stats.incomplete_mates_removed += 1
                continue
            pair = frozenset((mate.a, mate.b))
            if pair in seen_pairs:
                stats.duplicate_pair_mates_removed += 1
                continue
            seen_pairs.add(pair)
            asm_mate_keys.append(key)
            if key not in unique_mates:
                unique_mates[key] = (asm.id, mate)
        multiset = frozenset(Counter(asm_mate_keys).items())
        if multiset not in unique_assemblies:
            unique_assemblies[multiset] = asm
    stats.mates_out = len(unique_mates)
    stats.assemblies_out = len(unique_assemblies)
    return unique_parts, unique_mates, list(unique_assemblies.values()), stats
