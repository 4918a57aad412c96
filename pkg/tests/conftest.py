import numpy as np
import pytest

from brepmate.forge import make_box, make_capped_cylinder, make_plate_with_holes
from brepmate.forge.corpus import FAMILIES, generate_corpus
from brepmate.forge.examples import build_examples
from brepmate.model import ModelConfig
from brepmate.train_eval import TrainRunConfig, prepare_examples, train


@pytest.fixture(scope="session")
def cube():
    return make_box("cube", 1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def peg():
    return make_capped_cylinder("peg", 0.25, 0.4)


@pytest.fixture(scope="session")
def plate2():
    return make_plate_with_holes("plate2", 1.0, 0.8, 0.2, [(0.25, 0.0, 0.1), (-0.25, 0.1, 0.08)])


@pytest.fixture(scope="session")
def micro_corpus():
    parts, assemblies = generate_corpus(101, {f: 6 for f in FAMILIES})
    examples, stats = build_examples(assemblies, parts)
    return parts, assemblies, examples, stats


@pytest.fixture(scope="session")
def micro_models(micro_corpus):
    """Small trained location and type models shared across service tests."""
    parts, _, examples, _ = micro_corpus
    train_ex = [e for e in examples if e.split == "train"]
    val_ex = [e for e in examples if e.split != "train"]
    prepared_train = prepare_examples(train_ex, parts)
    prepared_val = prepare_examples(val_ex, parts)
    loc = train(TrainRunConfig(task="location", model=ModelConfig(head="location"),
                               epochs=3, seed=1), prepared_train, prepared_val)
    typ = train(TrainRunConfig(task="type", model=ModelConfig(head="type"),
                               epochs=3, seed=1), prepared_train, prepared_val)
    return loc.model, typ.model


def random_family_part(rng: np.random.Generator, idx: int):
    """One random part drawn from the generator families (for property loops)."""
    kind = rng.integers(0, 4)
    if kind == 0:
        return make_box(f"rand_box_{idx}", rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2),
                        rng.uniform(0.2, 0.8))
    if kind == 1:
        n = int(rng.integers(1, 4))
        radii = [rng.uniform(0.04, 0.1) for _ in range(n)]
        centers = np.linspace(-0.3, 0.3, n)
        holes = [(float(c), 0.0, r) for c, r in zip(centers, radii)]
        return make_plate_with_holes(f"rand_plate_{idx}", rng.uniform(0.9, 1.4),
                                     rng.uniform(0.5, 0.9), rng.uniform(0.1, 0.2), holes)
    if kind == 2:
        return make_capped_cylinder(f"rand_cyl_{idx}", rng.uniform(0.05, 0.2),
                                    rng.uniform(0.3, 0.9))
    from brepmate.forge import make_tube
    r = rng.uniform(0.05, 0.15)
    return make_tube(f"rand_tube_{idx}", r * rng.uniform(1.5, 2.5), r, rng.uniform(0.2, 0.6))
