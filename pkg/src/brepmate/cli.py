"""Umbrella command line: synth | featurize | train | eval | noisy-oracle
| suggest | serve."""

from __future__ import annotations

import json
import os

import click

from .brep.io import load_part, save_assembly, save_part
from .brep.model import Part
from .forge.corpus import FAMILIES, generate_corpus
from .forge.examples import SPLITS, build_examples, load_examples_jsonl, save_examples_jsonl
from .forge.fingerprint import dedup
from .graph import add_meta_paths, build_graph, graph_to_dict
from .model import ModelConfig
from .nn import save_checkpoint
from .service import build_app, load_model, suggest as run_suggest
from .train_eval import (
    TrainRunConfig,
    evaluate,
    fit_origin_type_table,
    hit_at_k,
    label_distribution_baseline,
    ndcg_star,
    noisy_oracle_curve,
    origin_type_baseline,
    prepare_examples,
    random_baseline,
    snap_to_selection_baseline,
    train as run_train,
    write_noise_curve_csv,
)


@click.group()
def main():
    """Mate suggestion pipeline for BREP parts."""


def _with_config_defaults(config_path, values: dict, defaults: dict) -> dict:
    """Resolve option values: explicit flag > config file entry > default."""
    overrides = {}
    if config_path:
        with open(config_path) as fh:
            overrides = json.load(fh)
    out = {}
    for key, value in values.items():
        if value is not None:
            out[key] = value
        elif key in overrides:
            out[key] = overrides[key]
        else:
            out[key] = defaults[key]
    return out


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------

def write_corpus(out_dir: str, parts: dict, assemblies: list, examples: list, stats: dict):
    os.makedirs(os.path.join(out_dir, "parts"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "assemblies"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "examples"), exist_ok=True)
    for pid, part in sorted(parts.items()):
        with open(os.path.join(out_dir, "parts", f"{pid}.json"), "wb") as fh:
            fh.write(save_part(part))
    for asm in assemblies:
        with open(os.path.join(out_dir, "assemblies", f"{asm.id}.json"), "wb") as fh:
            fh.write(save_assembly(asm))
    for split in SPLITS:
        save_examples_jsonl([e for e in examples if e.split == split],
                            os.path.join(out_dir, "examples", f"{split}.jsonl"))
    with open(os.path.join(out_dir, "stats.json"), "w") as fh:
        json.dump(stats, fh, sort_keys=True, indent=2)


def read_corpus(corpus_dir: str):
    parts: dict[str, Part] = {}
    parts_dir = os.path.join(corpus_dir, "parts")
    for name in sorted(os.listdir(parts_dir)):
        with open(os.path.join(parts_dir, name), "rb") as fh:
            part = load_part(fh.read())
        parts[part.id] = part
    examples = {}
    for split in SPLITS:
        path = os.path.join(corpus_dir, "examples", f"{split}.jsonl")
        examples[split] = load_examples_jsonl(path) if os.path.exists(path) else []
    return parts, examples


@main.command()
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON file with defaults for the other flags.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--plate-pegs", type=int, default=None)
@click.option("--block-stacks", type=int, default=None)
@click.option("--hinges", type=int, default=None)
@click.option("--shaft-bushings", type=int, default=None)
@click.option("--rail-sliders", type=int, default=None)
@click.option("--offset-plates", type=int, default=None)
@click.option("--all-families", type=int, default=None,
              help="Shorthand: this count for every family.")
def synth(seed, config_path, out_dir, plate_pegs, block_stacks, hinges, shaft_bushings,
          rail_sliders, offset_plates, all_families):
    """Generate a synthetic corpus with ground-truth mates."""
    opts = _with_config_defaults(config_path, {
        "seed": seed, "plate_pegs": plate_pegs, "block_stacks": block_stacks,
        "hinges": hinges, "shaft_bushings": shaft_bushings,
        "rail_sliders": rail_sliders, "offset_plates": offset_plates,
        "all_families": all_families,
    }, {"seed": 0, "plate_pegs": 0, "block_stacks": 0, "hinges": 0,
        "shaft_bushings": 0, "rail_sliders": 0, "offset_plates": 0,
        "all_families": None})
    seed = opts["seed"]
    counts = {
        "plate_peg": opts["plate_pegs"], "block_stack": opts["block_stacks"],
        "hinge": opts["hinges"], "shaft_bushing": opts["shaft_bushings"],
        "rail_slider": opts["rail_sliders"], "offset_plates": opts["offset_plates"],
    }
    if opts["all_families"] is not None:
        counts = {f: opts["all_families"] for f in FAMILIES}
    parts, assemblies = generate_corpus(seed, counts)
    unique_parts, unique_mates, unique_assemblies, dstats = dedup(parts, assemblies)
    examples, estats = build_examples(unique_assemblies, parts)
    stats = {"seed": seed, "counts": counts, "dedup": dstats.to_dict(), "examples": estats,
             "splits": {s: sum(1 for e in examples if e.split == s) for s in SPLITS}}
    write_corpus(out_dir, parts, unique_assemblies, examples, stats)
    click.echo(json.dumps(stats, sort_keys=True, indent=2))


@main.command()
@click.option("--part", "part_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def featurize(part_path, out_path):
    """Dump one part's featurized graph (with meta-paths) as JSON."""
    with open(part_path, "rb") as fh:
        part = load_part(fh.read())
    graph = add_meta_paths(build_graph(part))
    with open(out_path, "w") as fh:
        json.dump(graph_to_dict(graph), fh, sort_keys=True)
    click.echo(f"wrote {out_path}")


# ---------------------------------------------------------------------------
# Training and evaluation
# ---------------------------------------------------------------------------

@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON file with defaults for the other flags.")
@click.option("--task", type=click.Choice(["location", "type"]), default=None)
@click.option("--variant", type=click.Choice(["sbgcn", "plain"]), default=None)
@click.option("--features", type=click.Choice(["all", "fn-type"]), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--lr", type=float, default=None)
@click.option("--inner-layers", type=int, default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--history", "history_path", type=click.Path(), default=None)
def train(corpus_dir, config_path, task, variant, features, seed, epochs, lr,
          inner_layers, out_path, history_path):
    """Train a model and save the best-validation checkpoint."""
    opts = _with_config_defaults(config_path, {
        "task": task, "variant": variant, "features": features, "seed": seed,
        "epochs": epochs, "lr": lr, "inner_layers": inner_layers,
    }, {"task": "location", "variant": "sbgcn", "features": "all", "seed": 0,
        "epochs": 10, "lr": 0.001, "inner_layers": 6})
    task = opts["task"]
    parts, examples = read_corpus(corpus_dir)
    feature_set = "fn_type_only" if opts["features"] == "fn-type" else "all"
    model_cfg = ModelConfig(variant=opts["variant"], feature_set=feature_set, head=task,
                            inner_layers=opts["inner_layers"])
    cfg = TrainRunConfig(task=task, model=model_cfg, epochs=opts["epochs"],
                         seed=opts["seed"], lr=opts["lr"])
    train_prep = prepare_examples(examples["train"], parts, feature_set)
    val_prep = prepare_examples(examples["val"], parts, feature_set)
    result = run_train(cfg, train_prep, val_prep, log=click.echo)
    save_checkpoint(result.model.store, out_path)
    if history_path:
        with open(history_path, "w") as fh:
            json.dump(result.history, fh, sort_keys=True)
    click.echo(f"best epoch {result.best_epoch} (val metric {result.best_metric:.4f}) -> {out_path}")


@main.command("eval")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(exists=True))
@click.option("--split", type=click.Choice(list(SPLITS)), default="test", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def eval_cmd(corpus_dir, checkpoint_path, split, seed, out_path):
    """Evaluate a checkpoint plus the ad-hoc baselines on one split."""
    parts, examples = read_corpus(corpus_dir)
    model = load_model(checkpoint_path)
    task = model.store.metadata.get("task", model.config.head)
    prepared = prepare_examples(examples[split], parts, model.config.feature_set)
    report = evaluate(model, prepared, task, split)
    eval_examples = examples[split]
    if task == "location":
        table = fit_origin_type_table(examples["train"])
        baselines = {
            "random": random_baseline(eval_examples, seed),
            "origin_type": origin_type_baseline(eval_examples, table),
            "snap_to_selection": snap_to_selection_baseline(eval_examples, parts),
        }
        report["baselines"] = {
            name: {
                "hit_at_k": {str(k): hit_at_k(r, k) for k in range(1, 11)},
                "ndcg_star": ndcg_star(r),
                "accuracy_at_6": hit_at_k(r, 6),
            } for name, r in baselines.items()
        }
    else:
        r = label_distribution_baseline(eval_examples)
        report["baselines"] = {
            "label_distribution": {
                "hit_at_k": {str(k): hit_at_k(r, k) for k in range(1, 9)},
                "ndcg_star": ndcg_star(r),
            }
        }
    blob = json.dumps(report, sort_keys=True, indent=2)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(blob)
    click.echo(blob)


@main.command("noisy-oracle")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--split", type=click.Choice(list(SPLITS)), default="test", show_default=True)
@click.option("--lambdas", default="0,0.01,0.02,0.05,0.1,0.2,0.5,1.0", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def noisy_oracle(corpus_dir, split, lambdas, seed, out_path):
    """Regress-and-snap accuracy curve under controlled prediction noise."""
    parts, examples = read_corpus(corpus_dir)
    lams = [float(x) for x in lambdas.split(",") if x.strip()]
    accs = noisy_oracle_curve(examples[split], parts, lams, seed)
    write_noise_curve_csv(lams, accs, out_path)
    for lam, acc in zip(lams, accs):
        click.echo(f"lambda={lam}: accuracy={acc:.4f}")


# ---------------------------------------------------------------------------
# Interactive surface
# ---------------------------------------------------------------------------

@main.command("suggest")
@click.option("--part-a", "part_a_path", required=True, type=click.Path(exists=True))
@click.option("--part-b", "part_b_path", required=True, type=click.Path(exists=True))
@click.option("--face-a", required=True)
@click.option("--face-b", required=True)
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(exists=True))
@click.option("-k", type=int, default=6, show_default=True)
@click.option("--merge-equivalent", is_flag=True, default=False)
def suggest_cmd(part_a_path, part_b_path, face_a, face_b, checkpoint_path, k, merge_equivalent):
    """Rank mate locations for a face selection on two part files."""
    with open(part_a_path, "rb") as fh:
        part_a = load_part(fh.read())
    with open(part_b_path, "rb") as fh:
        part_b = load_part(fh.read())
    model = load_model(checkpoint_path)
    response = run_suggest(part_a, part_b, face_a, face_b, model,
                           k=k, merge_equivalent=merge_equivalent)
    click.echo(json.dumps(response, sort_keys=True, indent=2))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--location-model", "location_model_path", type=click.Path(exists=True), required=True)
@click.option("--type-model", "type_model_path", type=click.Path(exists=True), default=None)
@click.option("--parts-dir", type=click.Path(exists=True), default=None)
@click.option("--static-dir", type=click.Path(exists=True), default=None,
              help="Directory with the browser UI build to serve at /.")
def serve(host, port, location_model_path, type_model_path, parts_dir, static_dir):
    """Run the suggestion service."""
    import uvicorn

    parts = {}
    if parts_dir:
        for name in sorted(os.listdir(parts_dir)):
            if name.endswith(".json"):
                with open(os.path.join(parts_dir, name), "rb") as fh:
                    part = load_part(fh.read())
                parts[part.id] = part
    app = build_app(location_model_path, type_model_path, parts, static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
