import json

import numpy as np
import pytest

from semstyle import toy
from semstyle.cli import build_parser, run

SUBCOMMANDS = ["preprocess", "terms", "build-vocab", "train-termgen", "train-langgen", "train-lm",
               "train-clf", "caption", "termgen-decode", "evaluate", "retrieve", "possel", "gradcheck"]
FAST = ["--epochs", "2", "--batch-size", "16"]


@pytest.fixture
def work(tmp_path):
    triples = toy.all_triples()[::15]
    desc = [toy.descriptive_sentence(*t) for t in triples]
    styled = [toy.styled_sentence(*t) for t in triples]
    (tmp_path / "desc.txt").write_text("\n".join(desc) + "\n")
    (tmp_path / "styled.txt").write_text("\n".join(styled) + "\n")
    feats = toy.triple_features(triples, dim=8)
    with open(tmp_path / "caps.jsonl", "w") as fh:
        for i, (f, d) in enumerate(zip(feats, desc)):
            fh.write(json.dumps({"image_id": str(i), "feature": f.tolist(), "captions": [d]}) + "\n")
    (tmp_path / "small.json").write_text(json.dumps({"embed_dim": 8, "hidden_dim": 8, "dropout": 0.0}))
    return tmp_path


def test_every_subcommand_has_help(capsys):
    parser = build_parser()
    for name in SUBCOMMANDS:
        assert run([name, "--help"]) == 0
        out = capsys.readouterr().out
        sub = parser._subparsers._group_actions[0].choices[name]
        for action in sub._actions:
            for flag in action.option_strings:
                assert flag in out, (name, flag)


def test_usage_errors(capsys):
    assert run(["terms", "--in", "x", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert run([]) == 1
    assert run(["no-such-command"]) == 1


def test_terms_happy_path(work, capsys):
    (work / "s.txt").write_text("a train sitting in a station\nThe dog bounded through the fresh grass.\n")
    lex = work / "frames.lex"
    from semstyle.termpipe.frames import default_frame_lexicon
    default_frame_lexicon().save(lex)
    assert run(["terms", "--in", str(work / "s.txt"), "--lexicon", str(lex),
                "--out", str(work / "t.txt")]) == 0
    assert (work / "t.txt").read_text().splitlines() == [
        "train_NOUN Placing_FRAME station_NOUN", "dog_NOUN Self_motion_FRAME grass_NOUN"]
    assert run(["terms", "--in", str(work / "s.txt"), "--mode", "lempos"]) == 0
    assert "sit_VERB" in capsys.readouterr().out


def test_missing_input_is_data_error(work):
    assert run(["terms", "--in", str(work / "nope.txt")]) == 2
    assert run(["terms", "--in", str(work / "desc.txt"), "--lexicon", str(work / "desc.txt")]) == 2


def test_preprocess_and_vocab(work, capsys):
    out = work / "prep"
    assert run(["preprocess", "--styled", str(work / "styled.txt"), "--captions", str(work / "caps.jsonl"),
                "--feature-dim", "8", "--keep-top", "20", "--out", str(out)]) == 0
    assert (out / "styled.txt").read_text().count("\n") == 60
    assert run(["build-vocab", "--in", str(out / "styled.txt"), "--cap", "30", "--style-tokens",
                "--out", str(work / "v.txt")]) == 0
    assert "size\t30" in capsys.readouterr().out


def test_train_generate_evaluate(work, capsys):
    ck = work / "lg.ckpt"
    args = ["train-langgen", "--descriptive", str(work / "desc.txt"), "--styled", str(work / "styled.txt"),
            "--config", str(work / "small.json"), "--out", str(ck), *FAST]
    assert run(args) == 0
    first = ck.read_bytes()
    assert capsys.readouterr().out.startswith("epoch\tloss\tsteps\n0\t")
    assert run(args) == 0
    assert ck.read_bytes() == first

    (work / "terms.txt").write_text("dog_NOUN Placing_FRAME bench_NOUN\n")
    assert run(["caption", "--model", str(ck), "--terms", str(work / "terms.txt"),
                "--style", "desc", "--trace", str(work / "trace.txt")]) == 0
    rows = [r for r in (work / "trace.txt").read_text().splitlines() if r]
    assert rows and all(abs(sum(map(float, r.split())) - 1) < 1e-5 for r in rows)

    assert run(["train-lm", "--in", str(work / "styled.txt"), "--order", "3", "--out", str(work / "lm.json")]) == 0
    assert run(["train-clf", "--styled", str(work / "styled.txt"), "--descriptive", str(work / "desc.txt"),
                "--cv", "3", "--out", str(work / "clf.json")]) == 0
    assert "cv_accuracy\t" in capsys.readouterr().out
    assert run(["train-lm", "--gru", "--in", str(work / "styled.txt"), "--config", str(work / "small.json"),
                "--out", str(work / "grulm.ckpt"), *FAST]) == 0
    (work / "test.tsv").write_text(
        "dog_NOUN Placing_FRAME bench_NOUN\tthe dog sat on the bench .\n"
        "cat_NOUN Ingestion_FRAME\tthe cat ate near the lake .|a cat is eating\n")
    report = work / "report.txt"
    eval_args = ["evaluate", "--model", str(ck), "--test", str(work / "test.tsv"), "--lm", str(work / "lm.json"),
                 "--clf", str(work / "clf.json"), "--grulm", str(work / "grulm.ckpt"), "--report", str(report)]
    assert run(eval_args) == 0
    text = report.read_text()
    assert text.startswith("n_sentences\t2\nlm_bits\t")
    assert run(eval_args) == 0 and report.read_text() == text

    # truncated checkpoint: data error naming the checkpoint problem
    (work / "bad.ckpt").write_bytes(first[:-10])
    capsys.readouterr()
    assert run(["evaluate", "--model", str(work / "bad.ckpt"), "--test", str(work / "test.tsv")]) == 2
    assert "PayloadLengthError" in capsys.readouterr().err
    # wrong model kind
    assert run(["caption", "--model", str(work / "grulm.ckpt"), "--terms", str(work / "terms.txt")]) == 2


def test_termgen_train_and_decode(work, capsys):
    ck = work / "tg.ckpt"
    assert run(["train-termgen", "--captions", str(work / "caps.jsonl"), "--feature-dim", "8",
                "--config", str(work / "small.json"), "--out", str(ck), *FAST]) == 0
    np.save(work / "f.npy", toy.triple_features(toy.all_triples()[:3], dim=8))
    assert run(["termgen-decode", "--model", str(ck), "--features", str(work / "f.npy"), "--max-len", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines[-3:]) == 3 and all(len(ln.split()) <= 4 for ln in lines[-3:])


def test_nan_is_numeric_error(work, capsys):
    rec = json.dumps({"image_id": "x", "feature": [float("nan")] * 8, "captions": ["a dog is sitting"]})
    (work / "nan.jsonl").write_text(rec + "\n")
    assert run(["train-termgen", "--captions", str(work / "nan.jsonl"), "--feature-dim", "8",
                "--config", str(work / "small.json"), "--out", str(work / "x.ckpt"), *FAST]) == 3
    assert "numeric error" in capsys.readouterr().err
    assert not (work / "x.ckpt").exists()


def test_retrieve(work, capsys):
    assert run(["retrieve", "--index", str(work / "ix"), "--corpus", str(work / "styled.txt"),
                "--terms", "dog_NOUN Placing_FRAME bench_NOUN", "-n", "2"]) == 0
    hits = capsys.readouterr().out.splitlines()
    assert len(hits) == 2 and "dog" in hits[0]
    assert run(["retrieve", "--index", str(work / "ix"), "--terms", "zebra"]) == 0
    assert capsys.readouterr().out == ""


def test_possel_cli(work, capsys):
    sents = [" ".join(w for w, _ in s) + " ." for s in toy.noun_driven_corpus(60)]
    (work / "pos.txt").write_text("\n".join(sents) + "\n")
    assert run(["possel", "--corpus", str(work / "pos.txt"), "--config", str(work / "small.json"),
                "--out", str(work / "rank.txt"), *FAST]) == 0
    lines = (work / "rank.txt").read_text().splitlines()
    assert lines[0].startswith("#") and any(ln.startswith("0\t") for ln in lines)


def test_gradcheck(capsys):
    assert run(["gradcheck", "--shapes", "1"]) == 0
    assert capsys.readouterr().out.splitlines()[-1].startswith("max\t")
    assert run(["gradcheck", "--shapes", "1", "--tol", "1e-30"]) == 3
