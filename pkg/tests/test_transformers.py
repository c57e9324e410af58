# tests/test_transformers.py

import json

import numpy as np
import pandas as pd
import pytest

from morphomics.entities import FeatureTable, FeatureVector, GbtConfig, GbtModel
from morphomics.exceptions import FeatureMismatchError, ModelFormatError, MorphomicsError, TrainingDataError
from morphomics.services.classifier import feature_importance, predict_proba_batch, train
from morphomics.services.curvature import compute_curvature
from morphomics.services.evaluation import evaluate
from morphomics.transformers.mesh_io import read_off, write_curvature_csv, write_off, write_stl
from morphomics.transformers.model_io import load_model, save_model, write_config, write_importance
from morphomics.transformers.report_io import read_report, write_report, write_roc_csv
from morphomics.transformers.table_io import (
    align_features,
    frame_to_table,
    read_feature_table,
    read_labels,
    write_feature_rows,
    write_feature_table,
    write_labels,
)


@pytest.fixture
def trained_model():
    rng = np.random.default_rng(30)
    x = rng.standard_normal((60, 3))
    y = (x[:, 0] + x[:, 1] > 0).astype(int)
    return train(x, y, GbtConfig(max_depth=3, n_estimators=15, subsample=0.8, seed=2), feature_names=['a', 'b', 'c'])


def test_model_round_trip_predicts_identically(tmp_path, trained_model):
    path = save_model(trained_model, tmp_path / 'model.json')
    loaded = load_model(path)
    rows = np.random.default_rng(31).standard_normal((100, 3))
    assert np.array_equal(predict_proba_batch(loaded, rows), predict_proba_batch(trained_model, rows))
    assert loaded.feature_names == ['a', 'b', 'c']
    assert loaded.config == trained_model.config


def test_model_file_layout(tmp_path, trained_model):
    payload = json.loads(save_model(trained_model, tmp_path / 'model.json').read_text())
    assert payload['version'] == 1
    assert {'base_score', 'learning_rate', 'feature_names', 'trees'} <= set(payload)
    root = payload['trees'][0]['nodes'][0]
    assert {'feature', 'threshold', 'left', 'right'} <= set(root)
    assert 'leaf' not in root


def test_empty_model_round_trip(tmp_path):
    loaded = load_model(save_model(GbtModel(), tmp_path / 'empty.json'))
    assert predict_proba_batch(loaded, np.zeros((2, 4))).tolist() == [0.5, 0.5]


def test_truncated_model_file(tmp_path, trained_model):
    text = save_model(trained_model, tmp_path / 'model.json').read_text()
    truncated = tmp_path / 'truncated.json'
    truncated.write_text(text[: len(text) // 2])
    with pytest.raises(ModelFormatError):
        load_model(truncated)


@pytest.mark.parametrize('payload', [
    [1, 2, 3],
    {'version': 99, 'trees': []},
    {'version': 1, 'trees': [{'nodes': [{'feature': 0}]}]},
    {'version': 1, 'feature_names': ['a'], 'trees': [{'nodes': [
        {'feature': 4, 'threshold': 0.5, 'left': 1, 'right': 2}, {'leaf': 0.1}, {'leaf': -0.1},
    ]}]},
])
def test_malformed_models(tmp_path, payload):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps(payload))
    with pytest.raises(ModelFormatError):
        load_model(path)


def test_missing_model_file(tmp_path):
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / 'absent.json')


def test_config_and_importance_files(tmp_path, trained_model):
    config_path = write_config(trained_model, tmp_path / 'model.config.json')
    assert GbtConfig.model_validate_json(config_path.read_text()) == trained_model.config

    frame = pd.read_csv(write_importance(feature_importance(trained_model), tmp_path / 'importance.csv'))
    assert list(frame.columns) == ['feature', 'gain', 'split_count']
    assert sorted(frame['feature']) == ['a', 'b', 'c']
    assert list(frame['gain']) == sorted(frame['gain'], reverse=True)


def test_report_round_trip(tmp_path):
    rng = np.random.default_rng(32)
    labels = rng.integers(0, 2, size=40)
    labels[:2] = (0, 1)
    report = evaluate(rng.random(40) + labels, labels, n_bootstrap=50, seed=0)
    loaded = read_report(write_report(report, tmp_path / 'report.json'))
    assert loaded == report
    assert loaded.roc_points[0].threshold == np.inf


def test_roc_csv(tmp_path):
    report = evaluate([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1], n_bootstrap=10)
    frame = pd.read_csv(write_roc_csv(report.roc_points, tmp_path / 'roc.csv'))
    assert list(frame.columns) == ['threshold', 'fpr', 'tpr']
    assert len(frame) == 5
    assert np.isinf(frame['threshold'].iloc[0])


def test_unreadable_report(tmp_path):
    path = tmp_path / 'report.json'
    path.write_text('{"auc": 2.0}')
    with pytest.raises(MorphomicsError):
        read_report(path)


def test_off_round_trip_and_stl(tmp_path, unit_cube):
    loaded = read_off(write_off(unit_cube, tmp_path / 'cube.off'))
    assert loaded.same_as(unit_cube)
    stl = write_stl(unit_cube, tmp_path / 'cube.stl')
    # binary STL: 84 byte header plus 50 bytes per triangle
    assert stl.stat().st_size == 84 + 50 * 12


def test_curvature_csv(tmp_path, unit_cube, make_icosphere):
    field = compute_curvature(unit_cube)
    frame = pd.read_csv(write_curvature_csv(unit_cube, field, tmp_path / 'cube.csv'))
    assert list(frame.columns) == ['vertex_index', 'x', 'y', 'z', 'mean_curvature', 'angle_defect']
    assert len(frame) == 8
    assert frame['angle_defect'].to_numpy() == pytest.approx(np.full(8, 0.5 * np.pi))
    with pytest.raises(ValueError):
        write_curvature_csv(make_icosphere(1), field, tmp_path / 'bad.csv')


def test_feature_rows_round_trip(tmp_path):
    rows = [
        FeatureVector(bins=(0.25, 0.75), energy=1.5).as_row('0007', 1),
        FeatureVector(bins=(1.0, 0.0), energy=0.25).as_row('0003', 0),
    ]
    path = write_feature_rows(rows, tmp_path / 'features.csv')
    assert path.read_text().splitlines()[0] == 'id,bin_0,bin_1,energy,label'

    table = read_feature_table(path, require_label=True)
    assert table.ids == ['0007', '0003']
    assert table.names == ['bin_0', 'bin_1', 'energy']
    assert table.values.tolist() == [[0.25, 0.75, 1.5], [1.0, 0.0, 0.25]]
    assert table.labels.tolist() == [1, 0]

    again = read_feature_table(write_feature_table(table, tmp_path / 'copy.csv'))
    assert again.values.tolist() == table.values.tolist()


@pytest.mark.parametrize('frame', [
    pd.DataFrame({'bin_0': [0.1], 'label': [1]}),
    pd.DataFrame({'id': ['a'], 'bin_0': [0.1]}),
    pd.DataFrame({'id': ['a'], 'bin_0': ['x'], 'label': [1]}),
    pd.DataFrame({'id': ['a'], 'bin_0': [np.nan], 'label': [1]}),
    pd.DataFrame({'id': ['a'], 'bin_0': [0.1], 'label': [3]}),
    pd.DataFrame({'id': ['a'], 'label': [1]}),
])
def test_invalid_feature_frames(frame):
    with pytest.raises(TrainingDataError):
        frame_to_table(frame, require_label=True)


def test_missing_feature_file(tmp_path):
    with pytest.raises(TrainingDataError):
        read_feature_table(tmp_path / 'absent.csv')


def test_align_features():
    table = FeatureTable(ids=['a', 'b'], names=['x', 'y'], values=np.array([[1.0, 2.0], [3.0, 4.0]]))
    aligned = align_features(table, ['y', 'x'])
    assert aligned.values.tolist() == [[2.0, 1.0], [4.0, 3.0]]
    with pytest.raises(FeatureMismatchError):
        align_features(table, ['x', 'z'])


def test_labels_file(tmp_path):
    path = write_labels([{'id': 'n1', 'label': 1, 'kind': 'lobulated', 'seed': 3},
                         {'id': 'n2', 'label': 0, 'kind': 'ellipsoid', 'seed': 4}], tmp_path / 'labels.csv')
    assert read_labels(path) == {'n1': 1, 'n2': 0}

    bad = tmp_path / 'bad.csv'
    bad.write_text('id,label\nn1,2\n')
    with pytest.raises(TrainingDataError):
        read_labels(bad)
