import json

import pytest

from rolecraft.cli import EXIT_DATA, EXIT_OK, EXIT_TRANSPORT, EXIT_USAGE, main
from rolecraft.corpus import read_corpus

from conftest import DATA
from test_decoder import WORKED_A1, WORKED_TMP


FRAMES = str(DATA / "frames")
CORPUS = str(DATA / "figure1.jsonl")
SCRIPTED = f"scripted:{DATA / 'figure1_scorer.json'}"


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Synthetic corpora plus a small model trained through the CLI."""
    root = tmp_path_factory.mktemp("cliws")
    assert main(["synth", "-o", str(root), "--train", "60", "--dev", "20",
                 "--test", "20", "--seed", "3"]) == EXIT_OK
    model = root / "model.bin"
    assert main(["train", "--frames", str(root / "frames.jsonl"),
                 "--corpus", str(root / "train.jsonl"), "--stage", "all",
                 "--lambda", "3", "--epochs", "2", "-o", str(model)]) == EXIT_OK
    return root


class TestExitCodes:
    def test_no_verb(self, capsys):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == EXIT_USAGE

    def test_unknown_verb(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == EXIT_USAGE

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["train", "--corpus", "x.jsonl"])
        assert err.value.code == EXIT_USAGE

    def test_bad_float_list(self, capsys, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["ablate", "--config", "c.json", "--which", "sense-corruption",
                  "--rates", "a,b"])
        assert err.value.code == EXIT_USAGE

    def test_missing_data_file(self, tmp_path, capsys):
        code = main(["ingest-frames", str(tmp_path / "nope"),
                     "-o", str(tmp_path / "o.jsonl")])
        assert code == EXIT_DATA
        assert "data error" in capsys.readouterr().err

    def test_dead_scorer_endpoint(self, capsys):
        import socket
        probe = socket.create_server(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        code = main(["disambiguate", "--frames", FRAMES, "--corpus", CORPUS,
                     "--scorer", f"tcp:127.0.0.1:{port}", "--timeout", "2"])
        assert code == EXIT_TRANSPORT
        assert "transport error" in capsys.readouterr().err


class TestIngestAndConvert:
    def test_ingest_frames(self, tmp_path, capsys):
        out = tmp_path / "frames.jsonl"
        assert main(["ingest-frames", FRAMES, "-o", str(out)]) == EXIT_OK
        assert "1 lemma" in capsys.readouterr().out
        records = [json.loads(l) for l in out.read_text().splitlines()]
        assert len(records) == 1 and records[0]["lemma"] == "beat"
        assert {s["id"] for s in records[0]["senses"]} == {
            "beat.01", "beat.02", "beat.03"}

    def test_convert_round_trip(self, tmp_path):
        mid = tmp_path / "mid.conll"
        back = tmp_path / "back.jsonl"
        assert main(["convert", CORPUS, "--from", "normalized",
                     "--to", "conll-span", "-o", str(mid)]) == EXIT_OK
        assert main(["convert", str(mid), "--from", "conll-span",
                     "--to", "normalized", "-o", str(back)]) == EXIT_OK
        orig = read_corpus(CORPUS, "normalized")
        rt = read_corpus(str(back), "normalized")
        assert [i.gold_args for i in rt] == [i.gold_args for i in orig]
        assert [i.gold_sense for i in rt] == [i.gold_sense for i in orig]


class TestTrainVerb:
    def test_stage_all_reports_losses(self, workspace, capsys):
        # retrain tiny to observe stdout (the fixture already checked exit 0)
        out = workspace / "model2.bin"
        code = main(["train", "--frames", str(workspace / "frames.jsonl"),
                     "--corpus", str(workspace / "train.jsonl"), "--stage", "all",
                     "--lambda", "3", "--epochs", "1", "-o", str(out)])
        assert code == EXIT_OK
        text = capsys.readouterr().out
        assert "sense" in text and "role" in text and "bio" in text
        assert out.exists()

    def test_stage_all_requires_lambda(self, workspace):
        assert main(["train", "--frames", str(workspace / "frames.jsonl"),
                     "--corpus", str(workspace / "train.jsonl"),
                     "-o", str(workspace / "x.bin")]) == EXIT_DATA

    def test_stage_bio_requires_model(self, workspace):
        assert main(["train", "--frames", str(workspace / "frames.jsonl"),
                     "--corpus", str(workspace / "train.jsonl"), "--stage", "bio",
                     "--lambda", "3", "-o", str(workspace / "x.bin")]) == EXIT_DATA


class TestSelectionVerbs:
    def test_filter_roles_lambda(self, capsys):
        code = main(["filter-roles", "--corpus", CORPUS,
                     "--scorer", SCRIPTED, "--lambda", "3"])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["role_sets"] == [
            {"sent_id": "fig1", "pred_index": 4, "roles": ["A1", "A2", "TMP"]}]
        assert payload["selection"]["kept_pairs"] == 3

    def test_filter_roles_threshold(self, capsys):
        code = main(["filter-roles", "--corpus", CORPUS,
                     "--scorer", SCRIPTED, "--threshold", "0.75"])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["role_sets"][0]["roles"] == ["A1", "A2"]

    def test_filter_roles_needs_exactly_one_mode(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["filter-roles", "--corpus", CORPUS,
                  "--scorer", SCRIPTED])
        assert err.value.code == EXIT_USAGE

    def test_tune_lambda(self, workspace, capsys):
        code = main(["tune-lambda",
                     "--corpus", str(workspace / "dev.jsonl"),
                     "--scorer", f"reference:{workspace / 'model.bin'}",
                     "--target", "0.9"])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["target_recall"] == 0.9
        assert payload["selection"]["recall"] >= 0.9
        assert payload["lambda"] <= 6.0


class TestDisambiguateVerb:
    def test_decisions_jsonl(self, capsys):
        code = main(["disambiguate", "--frames", FRAMES, "--corpus", CORPUS,
                     "--scorer", SCRIPTED])
        assert code == EXIT_OK
        captured = capsys.readouterr()
        record = json.loads(captured.out.splitlines()[0])
        assert record["sense"] == "beat.02"
        assert record["score"] == 0.8
        assert record["lemma"] == "beat"
        assert "accuracy 1.0000" in captured.err

    def test_output_file(self, tmp_path):
        out = tmp_path / "senses.jsonl"
        assert main(["disambiguate", "--frames", FRAMES, "--corpus", CORPUS,
                     "--scorer", SCRIPTED, "-o", str(out)]) == EXIT_OK
        assert json.loads(out.read_text().splitlines()[0])["sense"] == "beat.02"


class TestPredictAndEvaluate:
    @pytest.fixture()
    def config_path(self, tmp_path):
        cfg = {"version": 1, "frames": FRAMES, "corpus": CORPUS,
               "scorer": SCRIPTED, "lambda": 3.0,
               "predictions_out": str(tmp_path / "preds.jsonl"),
               "report_out": str(tmp_path / "report.json")}
        path = tmp_path / "run.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_predict_writes_outputs(self, config_path, tmp_path, capsys):
        assert main(["predict", "--config", str(config_path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "predicted 1 predicates" in out
        assert "F1 1.0000" in out
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["evaluation"]["arguments"]["f1"] == 1.0
        preds = read_corpus(str(tmp_path / "preds.jsonl"), "normalized")
        assert preds[0].gold_sense == "beat.02"

    def test_predict_override_threshold(self, config_path, capsys):
        assert main(["predict", "--config", str(config_path),
                     "--threshold", "0.75"]) == EXIT_OK
        assert "kept 2 pairs" in capsys.readouterr().out

    def test_predict_missing_config(self, tmp_path):
        assert main(["predict", "--config", str(tmp_path / "no.json")]) == EXIT_DATA

    def test_evaluate_output(self, config_path, tmp_path, capsys):
        main(["predict", "--config", str(config_path)])
        capsys.readouterr()
        code = main(["evaluate", "--gold", CORPUS,
                     "--predictions", str(tmp_path / "preds.jsonl"),
                     "--frames", FRAMES])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["arguments"]["f1"] == 1.0
        assert report["sense"]["accuracy"] == 1.0
        assert report["single_sense_fraction"] == 0.0

    def test_evaluate_misaligned(self, workspace, capsys):
        code = main(["evaluate", "--gold", CORPUS,
                     "--predictions", str(workspace / "dev.jsonl")])
        assert code == EXIT_DATA


class TestAblateVerb:
    def test_sense_corruption(self, tmp_path, capsys):
        cfg = {"version": 1, "frames": FRAMES, "corpus": CORPUS,
               "scorer": SCRIPTED, "lambda": 3.0}
        path = tmp_path / "run.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "ablation.json"
        code = main(["ablate", "--config", str(path), "--which", "sense-corruption",
                     "--rates", "0.0,1.0", "-o", str(out)])
        assert code == EXIT_OK
        report = json.loads(out.read_text())
        assert report["ablation"] == "sense-corruption"
        assert [r["rate"] for r in report["series"]] == [0.0, 1.0]


class TestDumpQueries:
    def test_record_shape(self, capsys):
        assert main(["dump-queries", "--frames", FRAMES,
                     "--corpus", CORPUS]) == EXIT_OK
        record = json.loads(capsys.readouterr().out.splitlines()[0])
        assert record["tokens"][4] == "<p>" and record["tokens"][6] == "</p>"
        assert record["sense_question"] == "What is the sense of predicate beaten?"
        assert {o["sense_id"] for o in record["sense_options"]} == {
            "beat.01", "beat.02", "beat.03"}
        assert record["gold_sense"] == "beat.02"
        assert record["role_queries"]["A1"] == (
            "What are the A1 arguments of predicate beaten "
            "with meaning thing moving?")
        lanes = {b["role"]: b["tags"] for b in record["bio"]}
        assert lanes["A1"][0] == "B-N" and lanes["A1"][1] == "I-N"
        assert lanes["TMP"][6] == "B-N"
        assert all(len(b["tags"]) == 10 for b in record["bio"])

    def test_no_semantics_queries(self, capsys):
        assert main(["dump-queries", "--frames", FRAMES, "--corpus", CORPUS,
                     "--no-semantics"]) == EXIT_OK
        record = json.loads(capsys.readouterr().out.splitlines()[0])
        assert record["role_queries"]["A1"] == "A1"


class TestBaselineVerb:
    def test_report(self, workspace, capsys):
        code = main(["baseline", "--frames", str(workspace / "frames.jsonl"),
                     "--corpus", str(workspace / "train.jsonl"),
                     "--test-corpus", str(workspace / "test.jsonl")])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert 0.0 <= report["arguments"]["f1"] <= 1.0
        assert 0.0 <= report["sense"]["accuracy"] <= 1.0


class TestDecodeVerb:
    def test_worked_example(self, tmp_path, capsys):
        src = tmp_path / "lattices.jsonl"
        src.write_text(json.dumps({"roles": {"A1": WORKED_A1, "TMP": WORKED_TMP}}) + "\n")
        assert main(["decode", str(src)]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["tags"] == ["A1-B-N", "A1-I-N", "TMP-B-N"]
        assert out["spans"] == [[0, 1, "A1"], [2, 2, "TMP"]]
        assert out["merged_o"] == pytest.approx([0.24, 0.36, 0.45])

    def test_stdin_and_debug(self, monkeypatch, capsys):
        import io
        payload = json.dumps({"A1": WORKED_A1}) + "\n"
        monkeypatch.setattr("sys.stdin", io.StringIO(payload))
        assert main(["decode", "-", "--debug"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert "lattice" in out
        assert out["lattice"]["roles"] == ["A1"]

    def test_bad_line(self, tmp_path, capsys):
        src = tmp_path / "bad.jsonl"
        src.write_text("not json\n")
        assert main(["decode", str(src)]) == EXIT_DATA


class TestEndToEndFlow:
    def test_train_predict_evaluate(self, workspace, tmp_path, capsys):
        cfg = {"version": 1,
               "frames": str(workspace / "frames.jsonl"),
               "corpus": str(workspace / "test.jsonl"),
               "scorer": f"reference:{workspace / 'model.bin'}",
               "lambda": 3.0,
               "predictions_out": str(tmp_path / "preds.jsonl")}
        path = tmp_path / "run.json"
        path.write_text(json.dumps(cfg))
        assert main(["predict", "--config", str(path)]) == EXIT_OK
        capsys.readouterr()
        code = main(["evaluate", "--gold", str(workspace / "test.jsonl"),
                     "--predictions", str(tmp_path / "preds.jsonl")])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["arguments"]["f1"] > 0.5
        assert report["sense"]["accuracy"] > 0.5
