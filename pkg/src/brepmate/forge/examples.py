"""Selection examples: ranked-candidate training data built from mates.

For each mate, the selected face on each part is the ground-truth MCF's
orientation face. Candidates are the cross product of both sides' MCF
enumerations; positives are the candidate pairs whose resolved frames
both match the ground truth, which also captures every aliased
construction of the same location. Examples exceeding the candidate cap,
lacking positives, or selecting non-faces are dropped and counted.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from ..brep.model import Assembly, McfRef, Part
from ..errors import BrepmateError
from ..mcf import DEFAULT_TOL_ANG, DEFAULT_TOL_POS, enumerate_mcfs, mcfs_equivalent, resolve_frame
from .fingerprint import DEFAULT_QUANT, fingerprint

CANDIDATE_CAP = 10_000
SPLITS = ("train", "val", "test")


@dataclass
class SelectionExample:
    example_id: str
    part_a: str
    part_b: str
    face_a: str
    face_b: str
    candidates: list          # [(McfRef, McfRef), ...] in enumeration order
    positives: tuple          # indices into candidates
    mate_type: str
    split: str

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "part_a": self.part_a,
            "part_b": self.part_b,
            "face_a": self.face_a,
            "face_b": self.face_b,
            "mate_type": self.mate_type,
            "split": self.split,
            "positives": list(self.positives),
            "candidates": [
                {"a": {"origin_ref": a.origin_ref, "origin_type": a.origin_type, "orient_ref": a.orient_ref},
                 "b": {"origin_ref": b.origin_ref, "origin_type": b.origin_type, "orient_ref": b.orient_ref}}
                for a, b in self.candidates
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "SelectionExample":
        cands = [(McfRef(**c["a"]), McfRef(**c["b"])) for c in d["candidates"]]
        return SelectionExample(
            example_id=d["example_id"], part_a=d["part_a"], part_b=d["part_b"],
            face_a=d["face_a"], face_b=d["face_b"], candidates=cands,
            positives=tuple(d["positives"]), mate_type=d["mate_type"], split=d["split"],
        )


def split_for_pair(part_a: Part, part_b: Part, q: float = DEFAULT_QUANT) -> str:
    """Deterministic 80/10/10 split keyed only by the pair's fingerprints,
    so a part pair never straddles splits and regeneration reproduces it."""
    keys = sorted([repr(fingerprint(part_a, q).key()), repr(fingerprint(part_b, q).key())])
    digest = hashlib.sha256("|".join(keys).encode()).digest()
    bucket = int.from_bytes(digest[:4], "big") % 100
    if bucket < 80:
        return "train"
    if bucket < 90:
        return "val"
    return "test"


def build_examples(assemblies: list[Assembly], parts: dict[str, Part],
                   tol_pos: float = DEFAULT_TOL_POS, tol_ang: float = DEFAULT_TOL_ANG,
                   cap: int = CANDIDATE_CAP):
    """Returns (examples, stats). Deterministic over assembly order."""
    stats = {"examples": 0, "dropped_non_face": 0, "dropped_over_cap": 0,
             "dropped_no_positive": 0, "dropped_unresolvable": 0}
    examples: list[SelectionExample] = []
    for asm in sorted(assemblies, key=lambda a: a.id):
        for mate in asm.mates:
            part_a = parts[asm.instance(mate.a).part]
            part_b = parts[asm.instance(mate.b).part]
            face_a = mate.mcf_a.orient_ref
            face_b = mate.mcf_b.orient_ref
            if part_a.entity(face_a).tier != "face" or part_b.entity(face_b).tier != "face":
                stats["dropped_non_face"] += 1
                continue
            try:
                gt_a = resolve_frame(part_a, mate.mcf_a.origin_ref, mate.mcf_a.origin_type, mate.mcf_a.orient_ref)
                gt_b = resolve_frame(part_b, mate.mcf_b.origin_ref, mate.mcf_b.origin_type, mate.mcf_b.orient_ref)
            except BrepmateError:
                stats["dropped_unresolvable"] += 1
                continue
            mcfs_a = enumerate_mcfs(part_a, face_a)
            mcfs_b = enumerate_mcfs(part_b, face_b)
            if len(mcfs_a) * len(mcfs_b) > cap:
                stats["dropped_over_cap"] += 1
                continue
            candidates = []
            positives = []
            idx = 0
            for ma in mcfs_a:
                ok_a = mcfs_equivalent(ma.frame, gt_a, tol_pos, tol_ang)
                for mb in mcfs_b:
                    candidates.append((ma.ref(), mb.ref()))
                    if ok_a and mcfs_equivalent(mb.frame, gt_b, tol_pos, tol_ang):
                        positives.append(idx)
                    idx += 1
            if not positives:
                stats["dropped_no_positive"] += 1
                continue
            examples.append(SelectionExample(
                example_id=f"{asm.id}:{mate.a}-{mate.b}",
                part_a=part_a.id, part_b=part_b.id,
                face_a=face_a, face_b=face_b,
                candidates=candidates, positives=tuple(positives),
                mate_type=mate.mate_type,
                split=split_for_pair(part_a, part_b),
            ))
            stats["examples"] += 1
    return examples, stats


def save_examples_jsonl(examples: list[SelectionExample], path: str) -> None:
    with open(path, "w") as fh:
        for ex in examples:
            fh.write(json.dumps(ex.to_dict(), sort_keys=True) + "\n")


def load_examples_jsonl(path: str) -> list[SelectionExample]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(SelectionExample.from_dict(json.loads(line)))
    return out
