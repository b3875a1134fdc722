"""End-to-end pipeline, exit codes, idempotence, and config round-trips."""

import json

import pytest

from tmnovelty.cli import EXIT_MISSING, EXIT_OK, EXIT_VALIDATION, main
from tmnovelty.config import RunConfig, parse_config, serialize_config

from helpers import case_study_model


@pytest.fixture()
def corpus_dirs(tmp_path):
    known = tmp_path / "known"
    novel = tmp_path / "novel"
    known.mkdir()
    novel.mkdir()
    known_texts = [
        "the cricket match was won by england hitting six",
        "england won the cricket match with a six off the last ball",
        "a fine cricket innings with six runs and a hit",
        "cricket england match hit six ball won",
        "the bowler took a wicket in the cricket match",
        "england hit six in cricket again",
    ]
    novel_texts = [
        "england won the rugby match despite using old ball",
        "the rugby team won the match despite old tactics",
        "rugby scrum despite the old ball",
        "old rugby ball despite the rain",
        "a rugby match won despite old injuries",
        "rugby despite old england won match",
    ]
    for i, text in enumerate(known_texts):
        (known / f"k{i}.txt").write_text(text, "utf-8")
    for i, text in enumerate(novel_texts):
        (novel / f"n{i}.txt").write_text(text, "utf-8")
    return known, novel


def args(out, *extra):
    return [*extra, "--out", str(out)]


def run_pipeline(tmp_path, corpus_dirs, seed="7"):
    known, novel = corpus_dirs
    out = tmp_path / "out"
    base = [
        "--known-dir", str(known), "--novel-dir", str(novel),
        "--clauses", "16", "--vote-margin", "5", "--sensitivity", "3.0",
        "--state-count", "16", "--epochs", "10", "--seed", seed,
    ]
    assert main(["ingest", *base, "--out", str(out)]) == EXIT_OK
    assert main(["train", *base, "--out", str(out)]) == EXIT_OK
    assert main(["describe", *base, "--out", str(out)]) == EXIT_OK
    assert main(["tfidf", *base, "--out", str(out)]) == EXIT_OK
    assert main(["eval", *base, "--out", str(out)]) == EXIT_OK
    return out


class TestPipeline:
    def test_all_stages_produce_files(self, tmp_path, corpus_dirs):
        out = run_pipeline(tmp_path, corpus_dirs)
        for name in (
            "vocabulary.txt", "tokens.csv", "booldocs.csv", "model.tm",
            "clauses.csv", "epoch_trace.csv", "score_table.csv", "tfidf.csv",
            "report.json", "roc_tm.csv", "pr_tm.csv", "roc_tfidf.csv", "pr_tfidf.csv",
            "doc_scores.csv",
        ):
            assert (out / name).is_file(), name
        report = json.loads((out / "report.json").read_text("utf-8"))
        assert 0.0 <= report["tm"]["auc"] <= 1.0
        doc_rows = (out / "doc_scores.csv").read_text("utf-8").splitlines()
        assert doc_rows[0] == "doc_id,label,aggregate"
        assert len(doc_rows) == 13  # header + twelve documents

    def test_context_command(self, tmp_path, corpus_dirs):
        out = run_pipeline(tmp_path, corpus_dirs)
        known, novel = corpus_dirs
        code = main([
            "context", "--known-dir", str(known), "--novel-dir", str(novel),
            "--clauses", "16", "--vote-margin", "5", "--sensitivity", "3.0",
            "--state-count", "16", "--epochs", "10", "--seed", "7",
            "--words", "rugby,cricket", "--target-class", "novel",
            "--out", str(out),
        ])
        assert code == EXIT_OK
        matrix = (out / "context_novel.csv").read_text("utf-8").splitlines()
        assert matrix[0] == "word,rugby,cricket"
        assert len(matrix) == 3

    def test_train_is_deterministic_and_idempotent(self, tmp_path, corpus_dirs):
        out1 = run_pipeline(tmp_path / "run1", corpus_dirs)
        out2 = run_pipeline(tmp_path / "run2", corpus_dirs)
        for name in ("model.tm", "score_table.csv", "report.json", "vocabulary.txt"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_rerun_rewrites_byte_identical_outputs(self, tmp_path, corpus_dirs):
        known, novel = corpus_dirs
        out = run_pipeline(tmp_path, corpus_dirs)
        before = (out / "model.tm").read_bytes()
        base = [
            "--known-dir", str(known), "--novel-dir", str(novel),
            "--clauses", "16", "--vote-margin", "5", "--sensitivity", "3.0",
            "--state-count", "16", "--epochs", "10", "--seed", "7",
        ]
        assert main(["train", *base, "--out", str(out)]) == EXIT_OK
        assert (out / "model.tm").read_bytes() == before


class TestExitCodes:
    def test_eval_without_model_is_missing_input(self, tmp_path, corpus_dirs, capsys):
        known, novel = corpus_dirs
        out = tmp_path / "out"
        base = ["--known-dir", str(known), "--novel-dir", str(novel), "--out", str(out)]
        assert main(["ingest", *base]) == EXIT_OK
        code = main(["eval", *base])
        assert code == EXIT_MISSING
        assert "model not found" in capsys.readouterr().err

    def test_missing_corpus_dir(self, tmp_path):
        code = main([
            "ingest", "--known-dir", str(tmp_path / "absent"),
            "--novel-dir", str(tmp_path / "absent2"), "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_MISSING

    def test_no_corpus_source_is_validation_error(self, tmp_path):
        assert main(["ingest", "--out", str(tmp_path / "out")]) == EXIT_VALIDATION

    def test_malformed_config_is_validation_error(self, tmp_path, capsys):
        config = tmp_path / "bad.cfg"
        config.write_text("clauses == 12\n", "utf-8")
        code = main(["ingest", "--config", str(config), "--out", str(tmp_path / "out")])
        assert code == EXIT_VALIDATION

    def test_bad_params_are_validation_error(self, tmp_path, corpus_dirs):
        known, novel = corpus_dirs
        code = main([
            "ingest", "--known-dir", str(known), "--novel-dir", str(novel),
            "--clauses", "7", "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_VALIDATION

    def test_vocab_hash_mismatch(self, tmp_path, corpus_dirs, capsys):
        known, novel = corpus_dirs
        out = tmp_path / "out"
        base = [
            "--known-dir", str(known), "--novel-dir", str(novel),
            "--clauses", "16", "--vote-margin", "5", "--sensitivity", "3.0",
            "--state-count", "16", "--epochs", "2", "--seed", "1", "--out", str(out),
        ]
        assert main(["ingest", *base]) == EXIT_OK
        assert main(["train", *base]) == EXIT_OK
        # Re-ingest with a different vocabulary (higher min_df) under the same dir.
        assert main(["ingest", *base, "--min-df", "4"]) == EXIT_OK
        code = main(["describe", *base])
        assert code == EXIT_VALIDATION
        assert "hash mismatch" in capsys.readouterr().err


class TestCaseStudyGolden:
    def test_describe_matches_hand_ratio_golden(self, tmp_path):
        from fractions import Fraction

        from tmnovelty.corpus import write_vocabulary
        from helpers import case_study_vocab

        out = tmp_path / "out"
        out.mkdir()
        model = case_study_model()
        model.save(out / "model.tm")
        write_vocabulary(case_study_vocab(), out / "vocabulary.txt")
        assert main(["describe", "--out", str(out)]) == EXIT_OK
        lines = (out / "score_table.csv").read_text("utf-8").splitlines()

        # Golden rows from the hand-ratio oracle over the fixture clause bags.
        known = {"cricket": 4, "six": 4, "hit": 2, "england": 1, "match": 1, "won": 1, "ball": 1}
        novel = {"rugby": 4, "won": 2, "match": 2, "old": 2, "england": 1, "despite": 1, "ball": 1}
        words = sorted(set(known) | set(novel))
        oracle = {
            w: Fraction(max(novel.get(w, 0), 1), 13) / Fraction(max(known.get(w, 0), 1), 14)
            for w in words
        }
        expected_order = sorted(words, key=lambda w: (-oracle[w], w))
        header, *rows = lines
        assert header == "word,freq_known,freq_novel,rel_freq_known,rel_freq_novel,score"
        assert [r.split(",")[0] for r in rows] == expected_order
        for row in rows:
            word, f_k, f_n, _, _, score = row.split(",")
            assert int(f_k) == known.get(word, 0)
            assert int(f_n) == novel.get(word, 0)
            assert float(score) == pytest.approx(float(oracle[word]), abs=1e-12)


class TestConfigRoundTrip:
    def test_parse_serialize_parse_identity(self):
        config = RunConfig(known_dir="/tmp/k", clauses=128, sensitivity=4.5, stemming=False)
        text = serialize_config(config)
        assert parse_config(text) == config
        assert serialize_config(parse_config(text)) == text

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            parse_config("bogus = 1\n")

    def test_profile_application(self):
        config = RunConfig()
        config.apply_profile("desk")
        assert (config.clauses, config.vote_margin, config.sensitivity, config.epochs) == (
            200, 15, 5.0, 50,
        )
        config.apply_profile("full")
        assert config.clauses == 10_000 and config.epochs == 100

    def test_env_var_sets_default_output_dir(self, tmp_path, monkeypatch, corpus_dirs):
        known, novel = corpus_dirs
        target = tmp_path / "env_out"
        monkeypatch.setenv("TMNOVELTY_OUT", str(target))
        assert main(["ingest", "--known-dir", str(known), "--novel-dir", str(novel)]) == EXIT_OK
        assert (target / "vocabulary.txt").is_file()

    def test_lock_file_blocks_concurrent_use(self, tmp_path, corpus_dirs):
        known, novel = corpus_dirs
        out = tmp_path / "out"
        out.mkdir()
        (out / ".lock").write_text("12345", "utf-8")
        code = main(["ingest", "--known-dir", str(known), "--novel-dir", str(novel), "--out", str(out)])
        assert code == EXIT_VALIDATION
