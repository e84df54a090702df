"""Command line: ``convert``, ``sweep`` and ``report``."""

import argparse
import logging
import sys
from pathlib import Path

import yaml

from .corpus import convert_ohsumed
from .experiment import (
    ExperimentConfig,
    compare_best,
    format_winners,
    read_results,
    run_sweep,
    write_run,
)

logger = logging.getLogger("medtextcat")


def _csv_list(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def _int_list(text):
    return [int(part) for part in _csv_list(text)]


# flag dest -> ExperimentConfig field
_OVERRIDES = {
    "train": "train_path",
    "test": "test_path",
    "classifiers": "classifiers",
    "features": "feature_counts",
    "stopwords": "stopword_path",
    "seed": "seed",
    "jobs": "jobs",
    "knn_k": "knn_k",
    "knn_metric": "knn_metric",
    "nb_alpha": "nb_alpha",
    "smo_c": "smo_c",
    "smo_tol": "smo_tol",
    "smo_normalize": "smo_normalize",
    "tree_min_leaf": "tree_min_leaf",
    "forest_trees": "forest_trees",
    "forest_m_try": "forest_m_try",
    "forest_bootstrap": "forest_bootstrap",
}


def build_parser():
    parser = argparse.ArgumentParser(prog="medtextcat", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convert", help="convert a raw OHSUMED file to the canonical TSV format")
    conv.add_argument("raw", help="field-tagged OHSUMED/MEDLINE file")
    conv.add_argument("--category-map", required=True, help="TSV of 'MeSH heading<TAB>category'")
    conv.add_argument("--out", required=True, help="canonical TSV to write")

    sw = sub.add_parser("sweep", help="run the classifier x feature-count experiment")
    sw.add_argument("--config", help="YAML or JSON file with ExperimentConfig keys; flags override it")
    sw.add_argument("--train")
    sw.add_argument("--test")
    sw.add_argument("--classifiers", type=_csv_list, help="comma list from NB,KNN,SMO,Tree,Forest")
    sw.add_argument("--features", type=_int_list, help="ascending comma list of feature budgets")
    sw.add_argument("--stopwords", help="stopword file replacing the bundled SMART list")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--jobs", type=int, help="worker processes")
    sw.add_argument("--out-dir", default="results")
    sw.add_argument("--dump-debug", action="store_true", help="also write vocabulary, rankings, confusion grids, model digests")
    sw.add_argument("--knn-k", type=int)
    sw.add_argument("--knn-metric", choices=("cosine", "euclidean"))
    sw.add_argument("--nb-alpha", type=float)
    sw.add_argument("--smo-c", type=float)
    sw.add_argument("--smo-tol", type=float)
    sw.add_argument("--smo-normalize", action=argparse.BooleanOptionalAction, default=None)
    sw.add_argument("--tree-min-leaf", type=int)
    sw.add_argument("--forest-trees", type=int)
    sw.add_argument("--forest-m-try", type=int)
    sw.add_argument("--forest-bootstrap", action=argparse.BooleanOptionalAction, default=None)

    rep = sub.add_parser("report", help="print the per-feature-count winner table of a results CSV")
    rep.add_argument("results", help="results.csv written by sweep")
    return parser


def config_from_args(args):
    values = {}
    if args.config:
        loaded = yaml.safe_load(Path(args.config).read_text(encoding="utf-8")) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"{args.config}: expected a mapping of config keys")
        values.update(loaded)
    for dest, key in _OVERRIDES.items():
        value = getattr(args, dest)
        if value is not None:
            values[key] = value
    for required in ("train_path", "test_path"):
        if required not in values:
            raise ValueError(f"missing {required} (use --{required.split('_')[0]} or a config file)")
    return ExperimentConfig.from_mapping(values)


def _convert(args):
    summary = convert_ohsumed(args.raw, args.category_map, args.out)
    print(summary.format())


def _sweep(args):
    config = config_from_args(args)
    out_dir = Path(args.out_dir)
    results, manifest, timings = run_sweep(config, dump_dir=out_dir / "debug" if args.dump_debug else None)
    paths = write_run(out_dir, results, manifest, timings)
    print(paths["results"].read_text(encoding="utf-8"), end="")
    if len(config.classifiers) > 1:
        print()
        print(format_winners(compare_best(results)), end="")


def _report(args):
    print(format_winners(compare_best(read_results(args.results))), end="")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    handlers = {"convert": _convert, "sweep": _sweep, "report": _report}
    try:
        handlers[args.command](args)
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"medtextcat {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
