import json
import subprocess
import sys

import pytest

from cohscore.cli import main
from cohscore.corpus import Essay, derive_labels, normalize_punct, write_essays
from cohscore.punct import ReferenceLabels, base_sha256, write_punct_labels
from cohscore.scorer import read_features_csv, read_predictions_csv


def write_corpus(path, essays):
    write_essays(str(path), essays)
    return str(path)


def reference_for(essay_id, text):
    stripped = derive_labels(normalize_punct(text))
    return ReferenceLabels(essay_id, base_sha256(stripped.base), stripped.labels)


@pytest.fixture
def four_sentence_corpus(tmp_path):
    text = "第一句话。第二句话。第三句话。第四句话。"
    path = write_corpus(tmp_path / "essays.jsonl", [Essay(id="e1", paragraphs=[text])])
    return path, text


class TestSegment:
    def test_window_counts(self, tmp_path, four_sentence_corpus, capsys):
        essays, _ = four_sentence_corpus
        out = tmp_path / "windows.jsonl"
        assert main(["segment", "--in", essays, "--out", str(out), "--window", "2"]) == 0
        assert capsys.readouterr().out.strip() == "essays=1 windows=3"
        assert len(out.read_text(encoding="utf-8").splitlines()) == 3

    def test_empty_input(self, tmp_path, capsys):
        essays = tmp_path / "essays.jsonl"
        essays.write_text("", encoding="utf-8")
        out = tmp_path / "windows.jsonl"
        assert main(["segment", "--in", str(essays), "--out", str(out), "--window", "3"]) == 0
        assert out.read_text(encoding="utf-8") == ""

    def test_invalid_window_size(self, tmp_path, four_sentence_corpus):
        essays, _ = four_sentence_corpus
        code = main(["segment", "--in", essays, "--out", str(tmp_path / "w"), "--window", "4"])
        assert code == 1

    def test_missing_input_file(self, tmp_path):
        code = main(
            ["segment", "--in", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "w"),
             "--window", "2"]
        )
        assert code == 1

    def test_malformed_line_reports_line_number(self, tmp_path, capsys):
        essays = tmp_path / "essays.jsonl"
        essays.write_text('{"id": "a", "paragraphs": ["好。"]}\n{broken\n', encoding="utf-8")
        code = main(["segment", "--in", str(essays), "--out", str(tmp_path / "w"), "--window", "2"])
        assert code == 1
        assert ":2" in capsys.readouterr().err


class TestGenSamples:
    def test_same_seed_byte_identical(self, tmp_path, four_sentence_corpus):
        essays, _ = four_sentence_corpus
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out in (a, b):
            assert main(
                ["gen-samples", "--in", essays, "--out", str(out), "--window", "2",
                 "--seed", "11"]
            ) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_short_essays_warn_and_succeed(self, tmp_path, capsys):
        essays = write_corpus(
            tmp_path / "essays.jsonl",
            [Essay(id="e1", paragraphs=["一句。两句。"]), Essay(id="e2", paragraphs=["单句。"])],
        )
        out = tmp_path / "samples.jsonl"
        code = main(["gen-samples", "--in", essays, "--out", str(out), "--window", "3",
                     "--seed", "5"])
        captured = capsys.readouterr()
        assert code == 0
        assert "warning" in captured.err
        assert captured.out.strip() == "positives=0 negatives=0"
        assert out.read_text(encoding="utf-8") == ""

    def test_seed_required(self, tmp_path, four_sentence_corpus, capsys):
        essays, _ = four_sentence_corpus
        code = main(["gen-samples", "--in", essays, "--out", str(tmp_path / "s"),
                     "--window", "2"])
        assert code == 1


class TestFeaturize:
    def test_perfect_essay_row(self, tmp_path, capsys):
        text = "春天来了。春天很好。春天真美。春天最棒。"
        essays = write_corpus(tmp_path / "essays.jsonl", [Essay(id="e1", paragraphs=[text])])
        labels = tmp_path / "punct_labels.jsonl"
        write_punct_labels(str(labels), [reference_for("e1", text)])
        preds = tmp_path / "coh_preds.jsonl"
        preds.write_text(
            "\n".join(
                json.dumps({"essay_id": "e1", "window_id": i, "p_coherent": 0.9})
                for i in range(2)
            ) + "\n",
            encoding="utf-8",
        )
        out = tmp_path / "features.csv"
        code = main(["featurize", "--essays", essays, "--coh", str(preds),
                     "--punct", str(labels), "--out", str(out)])
        assert code == 0
        rows = read_features_csv(str(out))
        assert len(rows) == 1
        assert list(rows[0].features) == [1.0, 0, 0, 0, 0, 0, 0]

    def test_worked_example_rep_comma(self, tmp_path):
        text = "有一次我上学要迟到了。闷着头硬闯红灯。"
        restored = "有一次我上学要迟到了，闷着头硬闯红灯。"
        essays = write_corpus(tmp_path / "essays.jsonl", [Essay(id="e1", paragraphs=[text])])
        labels = tmp_path / "punct_labels.jsonl"
        write_punct_labels(str(labels), [reference_for("e1", restored)])
        out = tmp_path / "features.csv"
        code = main(["featurize", "--essays", essays, "--heuristic",
                     "--punct", str(labels), "--out", str(out)])
        assert code == 0
        row = read_features_csv(str(out))[0]
        assert list(row.features[1:]) == [0, 0, 1, 0, 0, 0]

    def test_counts_out(self, tmp_path):
        text = "有一次我上学要迟到了。闷着头硬闯红灯。"
        restored = "有一次我上学要迟到了，闷着头硬闯红灯。"
        essays = write_corpus(tmp_path / "essays.jsonl", [Essay(id="e1", paragraphs=[text])])
        labels = tmp_path / "punct_labels.jsonl"
        write_punct_labels(str(labels), [reference_for("e1", restored)])
        counts = tmp_path / "punct_counts.csv"
        code = main(["featurize", "--essays", essays, "--heuristic", "--punct", str(labels),
                     "--out", str(tmp_path / "f.csv"), "--counts-out", str(counts)])
        assert code == 0
        assert counts.read_text(encoding="utf-8").splitlines()[1] == "e1,0,0,1,0,0,0"

    def test_missing_labels_reports_id(self, tmp_path, capsys):
        text = "好句子。"
        essays = write_corpus(tmp_path / "essays.jsonl", [Essay(id="lonely", paragraphs=[text])])
        labels = tmp_path / "punct_labels.jsonl"
        write_punct_labels(str(labels), [])
        code = main(["featurize", "--essays", essays, "--heuristic",
                     "--punct", str(labels), "--out", str(tmp_path / "f.csv")])
        assert code == 1
        assert "lonely" in capsys.readouterr().err

    def test_hash_mismatch_reports_id(self, tmp_path, capsys):
        text = "好句子。"
        essays = write_corpus(tmp_path / "essays.jsonl", [Essay(id="e9", paragraphs=[text])])
        labels = tmp_path / "punct_labels.jsonl"
        bad = ReferenceLabels("e9", "f" * 64, derive_labels(normalize_punct(text)).labels)
        write_punct_labels(str(labels), [bad])
        code = main(["featurize", "--essays", essays, "--heuristic",
                     "--punct", str(labels), "--out", str(tmp_path / "f.csv")])
        assert code == 1
        assert "e9" in capsys.readouterr().err

    def test_missing_predictions_without_heuristic(self, tmp_path, capsys):
        text = "第一句。第二句。第三句。"
        essays = write_corpus(tmp_path / "essays.jsonl", [Essay(id="e1", paragraphs=[text])])
        labels = tmp_path / "punct_labels.jsonl"
        write_punct_labels(str(labels), [reference_for("e1", text)])
        preds = tmp_path / "coh_preds.jsonl"
        preds.write_text("", encoding="utf-8")
        code = main(["featurize", "--essays", essays, "--coh", str(preds),
                     "--punct", str(labels), "--out", str(tmp_path / "f.csv")])
        assert code == 1
        assert "coherence predictions" in capsys.readouterr().err


@pytest.fixture
def trained_setup(tmp_path):
    from cohscore.punct import PunctErrorCounts
    from cohscore.scorer import FeatureRow, assemble_features, write_features_csv
    import numpy as np

    rng = np.random.default_rng(17)
    rows = []
    for i in range(60):
        ratio = float(rng.uniform())
        counts = PunctErrorCounts(*(int(v) for v in rng.integers(0, 4, size=6)))
        level = int(min(2, max(0, round(2.2 * ratio - 0.2 * counts.total()))))
        rows.append(FeatureRow(f"e{i:02d}", assemble_features(ratio, counts), level))
    features = tmp_path / "features.csv"
    write_features_csv(str(features), rows)
    return features


class TestTrainPredictEvaluate:
    def test_full_loop(self, tmp_path, trained_setup, capsys):
        features = trained_setup
        model = tmp_path / "model.json"
        report = tmp_path / "train_report.json"
        assert main(["train", "--features", str(features), "--out", str(model),
                     "--report", str(report)]) == 0
        doc = json.loads(model.read_text(encoding="utf-8"))
        assert doc["kind"] == "gbrt"
        assert doc["constraints"] == [1, -1, -1, -1, -1, -1, -1]
        assert len(doc["trees"]) == 30
        rep = json.loads(report.read_text(encoding="utf-8"))
        assert len(rep["per_round_rmse"]) == 30

        predictions = tmp_path / "predictions.csv"
        assert main(["predict", "--features", str(features), "--model", str(model),
                     "--out", str(predictions)]) == 0
        assert len(read_predictions_csv(str(predictions))) == 60

        out = tmp_path / "report.json"
        assert main(["evaluate", "--pred", str(predictions), "--gold", str(features),
                     "--out", str(out)]) == 0
        metrics = json.loads(out.read_text(encoding="utf-8"))["metrics"]
        assert 0.0 <= metrics["macro_f1"] <= 1.0

    def test_monotone_off_and_rf_and_linear(self, tmp_path, trained_setup):
        features = trained_setup
        for extra in (["--model", "gbrt", "--monotone", "off"],
                      ["--model", "rf", "--seed", "3"],
                      ["--model", "linear"]):
            model = tmp_path / "model.json"
            assert main(["train", "--features", str(features), "--out", str(model)] + extra) == 0

    def test_rf_requires_seed(self, tmp_path, trained_setup, capsys):
        features = trained_setup
        code = main(["train", "--features", str(features), "--out", str(tmp_path / "m.json"),
                     "--model", "rf"])
        assert code == 1
        assert "--seed" in capsys.readouterr().err

    def test_train_idempotent(self, tmp_path, trained_setup):
        features = trained_setup
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["train", "--features", str(features), "--out", str(a)])
        main(["train", "--features", str(features), "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_evaluate_fixture_oracle(self, tmp_path, capsys):
        gold = [0, 0, 0, 1, 1, 1, 2, 2, 2, 2]
        predicted = [0, 1, 0, 1, 1, 2, 2, 2, 0, 2]
        from cohscore.punct import PunctErrorCounts
        from cohscore.scorer import (
            FeatureRow, Prediction, assemble_features, write_features_csv,
            write_predictions_csv,
        )
        features = tmp_path / "features.csv"
        write_features_csv(
            str(features),
            [FeatureRow(f"e{i}", assemble_features(0.5, PunctErrorCounts()), g)
             for i, g in enumerate(gold)],
        )
        preds = tmp_path / "predictions.csv"
        write_predictions_csv(
            str(preds), [Prediction(f"e{i}", float(p), p) for i, p in enumerate(predicted)]
        )
        out = tmp_path / "report.json"
        assert main(["evaluate", "--pred", str(preds), "--gold", str(features),
                     "--out", str(out)]) == 0
        metrics = json.loads(out.read_text(encoding="utf-8"))["metrics"]
        assert metrics["macro_f1"] == pytest.approx(25 / 36, abs=1e-12)
        assert metrics["confusion"] == [[2, 1, 0], [0, 2, 1], [1, 0, 3]]


class TestProcessLevel:
    def test_module_entry_point(self, tmp_path):
        essays = tmp_path / "essays.jsonl"
        essays.write_text("", encoding="utf-8")
        result = subprocess.run(
            [sys.executable, "-m", "cohscore.cli", "segment", "--in", str(essays),
             "--out", str(tmp_path / "w.jsonl"), "--window", "2"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0

    def test_usage_error_exits_one(self):
        result = subprocess.run(
            [sys.executable, "-m", "cohscore.cli", "segment", "--window", "9"],
            capture_output=True, text=True,
        )
        assert result.returncode == 1

    def test_help_exits_zero(self):
        result = subprocess.run(
            [sys.executable, "-m", "cohscore.cli", "--help"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert "featurize" in result.stdout
