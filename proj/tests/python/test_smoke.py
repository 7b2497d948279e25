"""Smoke checks for the python bindings: frozen values, determinism, round-trips."""

import json

import numpy as np
import pytest

import mdmt


def test_ed_loss_frozen_value():
    current = np.array([[0.5, -1.0], [2.0, 0.25]])
    stored = np.array([[0.0, -0.5], [1.5, 1.25]])
    res = mdmt.ed_loss(current, stored)
    assert res.value == pytest.approx(0.4375, abs=1e-15)
    np.testing.assert_allclose(
        res.feature_grad, [[0.25, -0.25], [0.25, -0.5]], atol=1e-15
    )


def test_metrics_on_small_matrix():
    m = np.array([[0.9, 0.0], [0.8, 0.9]])
    assert mdmt.average_accuracy(m, 2) == pytest.approx(0.85)
    assert mdmt.forgetting(m, 2) == pytest.approx(0.1)
    assert mdmt.ltr(m) == pytest.approx(0.1)


def test_matrix_round_trip():
    m = np.array([[1.0, 0.0], [0.25, 0.5]])
    text = mdmt.emit_matrix(m)
    assert text == "1.0000,0.0000\n0.2500,0.5000\n"
    np.testing.assert_array_equal(mdmt.parse_matrix(text), m)


def test_margin_loss_runs_and_reduces():
    feats = np.array([[0.3, -0.7]])
    head = mdmt.TaskHead(0, np.array([[0.5, -0.2], [0.1, 0.4]]), np.array([0.05, -0.1]))
    plain = mdmt.cds_loss(feats, [1], [head], 0)
    single = mdmt.softmax_ce_loss(feats, [1], head)
    assert plain.value == pytest.approx(single.value, abs=1e-15)


def test_train_sequence_deterministic():
    train, test = mdmt.gen_synthetic(4, 16, 12, 6, 0.1, 7)
    tasks = mdmt.gen_permuted_tasks(train, test, 3, 21)
    hp = mdmt.HyperParams()
    hp.lr = 0.1
    hp.batch_size = 4
    hp.quota = 8
    hp.seed = 5
    first = mdmt.train_sequence(tasks, [16, 16], hp)
    second = mdmt.train_sequence(tasks, [16, 16], hp)
    np.testing.assert_array_equal(first.matrix, second.matrix)
    np.testing.assert_array_equal(first.bshot, second.bshot)
    assert first.matrix.shape == (3, 3)
    assert np.all(np.tril(first.matrix) >= 0.0)
    assert np.all(np.triu(first.matrix, 1) == 0.0)


def test_run_config_reports_json():
    config = "\n".join(
        [
            "data.kind = permuted",
            "data.tasks = 2",
            "data.classes = 4",
            "data.dim = 16",
            "data.train_per_class = 8",
            "data.test_per_class = 4",
            "data.seed = 3",
            "model.layers = 16,16",
            "train.batch_size = 4",
            "train.quota = 8",
            "train.seed = 1",
        ]
    )
    matrix, bshot, report_json = mdmt.run_config(config)
    report = json.loads(report_json)
    assert report["T"] == 2
    assert matrix.shape == (2, 2)
    assert bshot.shape[0] == 2
    assert report["A_T"] == pytest.approx(mdmt.average_accuracy(matrix, 2), abs=5e-4)
