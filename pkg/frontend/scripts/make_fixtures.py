"""Build the service fixtures the frontend tests run against: two unit
cubes, a peg, and small trained location/type checkpoints."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", "src"))

from brepmate.brep import save_part
from brepmate.forge import make_box, make_capped_cylinder
from brepmate.forge.corpus import FAMILIES, generate_corpus
from brepmate.forge.examples import build_examples
from brepmate.model import ModelConfig
from brepmate.nn import save_checkpoint
from brepmate.train_eval import TrainRunConfig, prepare_examples, train

OUT = os.path.join(os.path.dirname(__file__), "..", ".fixtures")


def main():
    parts_dir = os.path.join(OUT, "parts")
    os.makedirs(parts_dir, exist_ok=True)
    for part in (make_box("cube_a", 1.0, 1.0, 1.0),
                 make_box("cube_b", 1.0, 1.0, 1.0),
                 make_capped_cylinder("peg", 0.2, 0.5)):
        with open(os.path.join(parts_dir, f"{part.id}.json"), "wb") as fh:
            fh.write(save_part(part))

    parts, assemblies = generate_corpus(314, {f: 6 for f in FAMILIES})
    examples, _ = build_examples(assemblies, parts)
    train_ex = [e for e in examples if e.split == "train"]
    val_ex = [e for e in examples if e.split != "train"]
    prepared_train = prepare_examples(train_ex, parts)
    prepared_val = prepare_examples(val_ex, parts)
    loc = train(TrainRunConfig(task="location", model=ModelConfig(head="location"),
                               epochs=3, seed=0), prepared_train, prepared_val)
    typ = train(TrainRunConfig(task="type", model=ModelConfig(head="type"),
                               epochs=3, seed=0), prepared_train, prepared_val)
    save_checkpoint(loc.model.store, os.path.join(OUT, "location.ckpt.json"))
    save_checkpoint(typ.model.store, os.path.join(OUT, "type.ckpt.json"))
    print(f"fixtures written to {os.path.abspath(OUT)}")


if __name__ == "__main__":
    main()
