"""
3D-morphomics command line

Commands:
- synth: write a labelled synthetic mask corpus
- extract: masks -> feature CSV (parallel with --jobs, order preserved)
- train: tune on an 80/20 split, refit with the final learning rate and rounds
- evaluate: AUC, Youden operating point, bootstrap summary, ROC CSV
- compare: Welch test on two reports' bootstrap AUCs
- stats: per-feature class means with Welch p-values
- split: stratified train/test split of a feature CSV

Run with `python -m morphomics.main <command> ...`.
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from morphomics.config import MORPHOMICS_JOBS, MORPHOMICS_LOG, MORPHOMICS_SEED, PipelineConfig, configure_logging
from morphomics.entities.features import HistogramSpec
from morphomics.entities.gbt import FINAL_ESTIMATORS, FINAL_LEARNING_RATE
from morphomics.exceptions import MorphomicsError
from morphomics.helpers.seeding import derive_seed
from morphomics.services.classifier import feature_importance, predict_proba_batch, train
from morphomics.services.evaluation import evaluate, feature_class_statistics, roc_auc, welch_test
from morphomics.services.features import run_pipeline
from morphomics.services.synthkit import CORPUS_DIMS, CORPUS_SPACING_MM, write_corpus
from morphomics.services.tuning import DEFAULT_BUDGET, RandomSearchSampler, stratified_split, tune
from morphomics.telemetry.run_tracker import RunTracker
from morphomics.transformers.mask_io import is_mask_file, load_mask
from morphomics.transformers.mesh_io import write_curvature_csv, write_off
from morphomics.transformers.model_io import load_model, save_model, write_config, write_importance
from morphomics.transformers.report_io import read_report, write_report, write_roc_csv
from morphomics.transformers.table_io import (
    align_features,
    read_feature_table,
    read_labels,
    table_to_frame,
    write_feature_rows,
    write_feature_table,
    write_frame,
)

logger = logging.getLogger(__name__)


# ============================================================================
# Extraction
# ============================================================================

def collect_inputs(source: Path) -> List[Tuple[str, Path]]:
    """(id, path) for every mask under `source`, sorted by id"""
    if source.is_file():
        candidates = [source]
    elif source.is_dir():
        candidates = [p for p in source.iterdir() if p.is_file() and is_mask_file(p)]
    else:
        raise MorphomicsError(f"input {source} does not exist")
    inputs = sorted((p.stem, p) for p in candidates)
    if not inputs:
        raise MorphomicsError(f"no mask files under {source}")
    return inputs


def _extract_one(task: Tuple[str, Path, HistogramSpec, PipelineConfig, Optional[Path]]) -> Dict:
    """Worker: one mask -> feature row or failure reason"""
    sample_id, path, spec, config, mesh_dir = task
    try:
        result = run_pipeline(load_mask(path), spec, config)
        if mesh_dir is not None:
            write_off(result.mesh, mesh_dir / f"{sample_id}.off")
            write_curvature_csv(result.mesh, result.curvature, mesh_dir / f"{sample_id}.curvature.csv")
    except (ValueError, RuntimeError, OSError) as e:
        # MorphomicsError is a ValueError
        return {'id': sample_id, 'row': None, 'reason': f"{type(e).__name__}: {str(e)}", 'stats': None}
    return {
        'id': sample_id,
        'row': result.features.as_row(sample_id),
        'reason': None,
        'stats': result.stats.model_dump(),
    }


def cmd_extract(args, tracker: RunTracker) -> int:
    spec = HistogramSpec(bin_count=args.bins, lo=args.lo, hi=args.hi, clamp_out_of_range=not args.no_clamp)
    config = PipelineConfig(
        spacing_mm=args.spacing,
        patch_side=args.patch,
        quantity=args.quantity,
        normalize_by_area=args.normalize_area,
    )
    inputs = collect_inputs(Path(args.input))
    labels = read_labels(args.labels) if args.labels else None
    mesh_dir = Path(args.mesh_dir) if args.mesh_dir else None
    if mesh_dir is not None:
        mesh_dir.mkdir(parents=True, exist_ok=True)

    run_id = tracker.start_run('extract', {'input': args.input, 'count': len(inputs), 'jobs': args.jobs})
    logger.info(f"Extracting features from {len(inputs)} masks with {args.jobs} worker(s)")

    tasks = [(sample_id, path, spec, config, mesh_dir) for sample_id, path in inputs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_extract_one, tasks))
    else:
        outcomes = [_extract_one(task) for task in tasks]

    rows = []
    for outcome in outcomes:
        sample_id, row, reason = outcome['id'], outcome['row'], outcome['reason']
        if row is not None and labels is not None:
            if sample_id in labels:
                row['label'] = int(labels[sample_id])
            else:
                row, reason = None, "no label for id"
        if row is None:
            logger.warning(f"Skipped {sample_id}: {reason}")
            tracker.record_item(run_id, sample_id, 'skipped', reason=reason, stats=outcome['stats'])
            continue
        rows.append(row)
        tracker.record_item(run_id, sample_id, 'ok', stats=outcome['stats'])

    if not rows:
        logger.error("No mask produced features")
        tracker.finish_run(run_id, 'failed')
        return 1

    write_feature_rows(rows, args.out)
    tracker.record_result(run_id, 'features', str(args.out))
    tracker.finish_run(run_id)
    logger.info(f"Wrote {len(rows)} rows to {args.out} ({len(inputs) - len(rows)} skipped)")
    return 0


# ============================================================================
# Training and evaluation
# ============================================================================

def cmd_train(args, tracker: RunTracker) -> int:
    table = read_feature_table(args.features, require_label=True)
    labels = table.labels
    n_pos = int(labels.sum())
    n_neg = table.row_count - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MorphomicsError("training table holds a single class")
    scale_pos_weight = n_neg / n_pos

    run_id = tracker.start_run('train', {'features': args.features, 'budget': args.tune_budget, 'seed': args.seed})
    chosen = tune(
        table.values, labels,
        budget=args.tune_budget,
        valid_fraction=args.valid_fraction,
        sampler=RandomSearchSampler(),
        scale_pos_weight=scale_pos_weight,
        seed=derive_seed(args.seed, 'tune'),
        feature_names=table.names,
    )
    final = chosen.for_final_fit(learning_rate=args.final_lr, n_estimators=args.final_rounds)
    model = train(table.values, labels, final, table.names)

    out = Path(args.out)
    save_model(model, out)
    write_config(model, out.with_suffix('.config.json'))
    write_importance(feature_importance(model), out.with_suffix('.importance.csv'))

    train_auc = roc_auc(predict_proba_batch(model, table.values), labels)
    tracker.record_result(run_id, 'config', final.model_dump())
    tracker.record_result(run_id, 'train_auc', train_auc)
    tracker.finish_run(run_id)
    logger.info(f"Saved model to {out} (training AUC {train_auc:.4f})")
    return 0


def cmd_evaluate(args, tracker: RunTracker) -> int:
    model = load_model(args.model)
    table = align_features(read_feature_table(args.features, require_label=True), model.feature_names)
    scores = predict_proba_batch(model, table.values)

    run_id = tracker.start_run('evaluate', {'features': args.features, 'model': args.model})
    report = evaluate(scores, table.labels, n_bootstrap=args.bootstrap, seed=derive_seed(args.seed, 'bootstrap'))
    write_report(report, args.out)
    if args.roc:
        write_roc_csv(report.roc_points, args.roc)

    tracker.record_result(run_id, 'auc', report.auc)
    tracker.finish_run(run_id)
    return 0


def cmd_compare(args, tracker: RunTracker) -> int:
    report_a = read_report(args.report_a)
    report_b = read_report(args.report_b)
    result = welch_test(report_a.bootstrap.samples, report_b.bootstrap.samples)

    payload = json.dumps(result.model_dump(), indent=2)
    if args.out:
        Path(args.out).write_text(payload + '\n', encoding='utf-8')
    else:
        print(payload)
    logger.info(f"Welch t={result.t:.4f} df={result.df:.1f} p={result.p_two_sided:.4g}")
    return 0


# ============================================================================
# Corpus and table utilities
# ============================================================================

def cmd_synth(args, tracker: RunTracker) -> int:
    run_id = tracker.start_run('synth', {'benign': args.benign, 'malignant': args.malignant, 'seed': args.seed})
    labels_path = write_corpus(
        args.out, args.benign, args.malignant, seed=args.seed,
        spacing=(args.spacing,) * 3, dims=(args.dims,) * 3,
    )
    tracker.record_result(run_id, 'labels', str(labels_path))
    tracker.finish_run(run_id)
    return 0


def cmd_stats(args, tracker: RunTracker) -> int:
    table = read_feature_table(args.features, require_label=True)
    statistics = feature_class_statistics(table_to_frame(table), table.names)
    write_frame(statistics, args.out)
    logger.info(f"Wrote class statistics of {len(table.names)} features to {args.out}")
    return 0


def cmd_split(args, tracker: RunTracker) -> int:
    table = read_feature_table(args.features, require_label=True)
    train_rows, test_rows = stratified_split(table.labels, args.test_fraction, derive_seed(args.seed, 'split'))
    write_feature_table(table.take(train_rows), args.train_out)
    write_feature_table(table.take(test_rows), args.test_out)
    logger.info(f"Split {table.row_count} rows into {len(train_rows)} train / {len(test_rows)} test")
    return 0


COMMANDS = {
    'synth': cmd_synth,
    'extract': cmd_extract,
    'train': cmd_train,
    'evaluate': cmd_evaluate,
    'compare': cmd_compare,
    'stats': cmd_stats,
    'split': cmd_split,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='morphomics', description="Curvature-distribution features from 3D masks")
    parser.add_argument('--log-level', default=MORPHOMICS_LOG, help="error, warning, info or debug")
    sub = parser.add_subparsers(dest='command', required=True)

    synth = sub.add_parser('synth', help="write a synthetic labelled corpus")
    synth.add_argument('--benign', type=int, required=True)
    synth.add_argument('--malignant', type=int, required=True)
    synth.add_argument('--out', required=True)
    synth.add_argument('--seed', type=int, default=MORPHOMICS_SEED)
    synth.add_argument('--spacing', type=float, default=CORPUS_SPACING_MM)
    synth.add_argument('--dims', type=int, default=CORPUS_DIMS)

    extract = sub.add_parser('extract', help="masks -> feature CSV")
    extract.add_argument('--in', dest='input', required=True, help="mask file or directory")
    extract.add_argument('--out', required=True)
    extract.add_argument('--bins', type=int, default=10)
    extract.add_argument('--lo', type=float, default=-0.2)
    extract.add_argument('--hi', type=float, default=0.2)
    extract.add_argument('--no-clamp', action='store_true', help="drop out-of-window values instead of clamping")
    extract.add_argument('--spacing', type=float, default=0.625)
    extract.add_argument('--patch', type=int, default=64)
    extract.add_argument('--quantity', choices=['mean', 'gaussian'], default='mean')
    extract.add_argument('--normalize-area', action='store_true', help="divide mean curvature by vertex area")
    extract.add_argument('--labels', help="labels CSV (id,label) joined into the output")
    extract.add_argument('--mesh-dir', help="write final meshes (OFF) and curvature CSVs here")
    extract.add_argument('--jobs', type=int, default=MORPHOMICS_JOBS)

    train_cmd = sub.add_parser('train', help="tune and fit a boosted tree model")
    train_cmd.add_argument('--features', required=True)
    train_cmd.add_argument('--out', required=True)
    train_cmd.add_argument('--tune-budget', type=int, default=DEFAULT_BUDGET)
    train_cmd.add_argument('--valid-fraction', type=float, default=0.2)
    train_cmd.add_argument('--seed', type=int, default=MORPHOMICS_SEED)
    train_cmd.add_argument('--final-lr', type=float, default=FINAL_LEARNING_RATE)
    train_cmd.add_argument('--final-rounds', type=int, default=FINAL_ESTIMATORS)

    evaluate_cmd = sub.add_parser('evaluate', help="score a labelled feature CSV")
    evaluate_cmd.add_argument('--features', required=True)
    evaluate_cmd.add_argument('--model', required=True)
    evaluate_cmd.add_argument('--out', required=True)
    evaluate_cmd.add_argument('--bootstrap', type=int, default=5000)
    evaluate_cmd.add_argument('--roc')
    evaluate_cmd.add_argument('--seed', type=int, default=MORPHOMICS_SEED)

    compare = sub.add_parser('compare', help="Welch test on two reports' bootstrap AUCs")
    compare.add_argument('--report-a', required=True)
    compare.add_argument('--report-b', required=True)
    compare.add_argument('--out')

    stats = sub.add_parser('stats', help="per-feature class statistics")
    stats.add_argument('--features', required=True)
    stats.add_argument('--out', required=True)

    split = sub.add_parser('split', help="stratified train/test split")
    split.add_argument('--features', required=True)
    split.add_argument('--test-fraction', type=float, default=0.5)
    split.add_argument('--train-out', required=True)
    split.add_argument('--test-out', required=True)
    split.add_argument('--seed', type=int, default=MORPHOMICS_SEED)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 2
    if getattr(args, 'jobs', 1) < 1:
        logger.error("--jobs must be at least 1")
        return 2
    try:
        return COMMANDS[args.command](args, RunTracker())
    except (ValueError, OSError) as e:
        # MorphomicsError and entity validation errors are ValueErrors
        logger.error(f"{args.command} failed: {str(e)}")
        return 2


if __name__ == '__main__':
    sys.exit(main())
