"""Command-line entry point: ``semstyle <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
Progress and metric rows go to stdout (tab separated), diagnostics to stderr.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("semstyle")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _read_lines(path):
    if path == "-":
        return [ln.rstrip("\n") for ln in sys.stdin]
    return Path(path).read_text(encoding="utf-8").splitlines()


def _write_lines(path, lines):
    text = "".join(ln + "\n" for ln in lines)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _train_config(args, **overrides):
    from .trainer import TrainConfig
    cfg = TrainConfig.load(args.config) if args.config else TrainConfig()
    flags = {k: getattr(args, k) for k in ("epochs", "lr", "batch_size", "mode", "max_steps")
             if getattr(args, k, None) is not None}
    flags["seed"] = args.seed
    flags.update(overrides)
    return replace(cfg, **flags)


def _lexicon(args):
    from .termpipe.frames import FrameLexicon, default_frame_lexicon
    return FrameLexicon.load(args.lexicon) if getattr(args, "lexicon", None) else default_frame_lexicon()


def _term_pairs(sentences, lex, mode="frames"):
    from .termpipe.pipeline import TermConfig, extract_terms
    from .text import normalize
    cfg = TermConfig(mode=mode)
    return [(extract_terms(s, lex, cfg).render(), normalize(s)) for s in sentences]


# --------------------------------------------------------------------------
# subcommands

def cmd_preprocess(args):
    from .corpus import (build_keep_list, dump_captions, load_and_filter_styled, load_captions,
                         select_preferred)
    from .text import normalize
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = load_captions(args.captions, args.feature_dim, args.strict)
    if args.split:
        records = [r for r in records if r.split == args.split]
    captions = [c for r in records for c in r.captions]
    keep = build_keep_list(captions, args.keep_top)
    styled = load_and_filter_styled(args.styled, keep, args.strict)
    if args.select:
        from collections import Counter
        freq = Counter(w for c in captions for w in normalize(c))
        styled = select_preferred(styled, freq, args.select)
    _write_lines(out / "styled.txt", [s.text for s in styled])
    _write_lines(out / "descriptive.txt", [" ".join(normalize(c)) for c in captions])
    _write_lines(out / "keep_list.txt", sorted(keep))
    dump_captions(records, out / "captions.jsonl")
    print(f"records\t{len(records)}\ncaptions\t{len(captions)}\nstyled\t{len(styled)}")


def cmd_terms(args):
    from .termpipe.pipeline import TermConfig, extract_terms
    lex, cfg = _lexicon(args), TermConfig(mode=args.mode)
    _write_lines(args.out, [str(extract_terms(s, lex, cfg)) for s in _read_lines(args.input)])


def cmd_build_vocab(args):
    from .corpus import STYLE_TOKENS, build_vocab
    tokens = (t for line in _read_lines(args.input) for t in line.split())
    vocab = build_vocab(tokens, args.cap, args.min_count, STYLE_TOKENS if args.style_tokens else ())
    vocab.save(args.out)
    print(f"size\t{len(vocab)}")


def _print_epoch(stats):
    print(f"{stats.epoch}\t{stats.loss:.6f}\t{stats.steps}", flush=True)


def cmd_train_termgen(args):
    from .corpus import load_captions
    from .termpipe.pipeline import extract_terms
    from .trainer import save_checkpoint, train_termgen
    records = load_captions(args.captions, args.feature_dim, args.strict)
    lex = _lexicon(args)
    feats, terms = [], []
    for r in records:
        for c in r.captions:
            feats.append(r.feature)
            terms.append(extract_terms(c, lex).render())
    cfg = _train_config(args, feature_dim=args.feature_dim)
    print("epoch\tloss\tsteps")
    model = train_termgen(np.array(feats), terms, cfg, callback=_print_epoch)
    save_checkpoint(model, args.out)


def cmd_train_langgen(args):
    from .trainer import save_checkpoint, train_langgen
    lex = _lexicon(args)
    desc = _term_pairs(_read_lines(args.descriptive), lex) if args.descriptive else []
    styled = _term_pairs(_read_lines(args.styled), lex) if args.styled else []
    cfg = _train_config(args)
    print("epoch\tloss\tsteps")
    model = train_langgen(desc, styled, cfg, callback=_print_epoch)
    save_checkpoint(model, args.out)


def cmd_train_lm(args):
    sentences = [ln.split() for ln in _read_lines(args.input) if ln.strip()]
    if args.gru:
        from .styleval.grulm import train_gru_lm
        from .trainer import save_checkpoint
        model = train_gru_lm(sentences, _train_config(args))
        for i, loss in enumerate(model.losses):
            print(f"{i}\t{loss:.6f}")
        save_checkpoint(model, args.out)
    else:
        from .styleval.ngram import NgramLm, bits_per_word
        lm = NgramLm(sentences, order=args.order, discount=args.discount, min_count=args.min_count)
        lm.save(args.out)
        print(f"train_bits\t{bits_per_word(lm, sentences):.6f}")


def cmd_train_clf(args):
    from .styleval.clf import cross_val_accuracy, train_clf
    styled, desc = _read_lines(args.styled), _read_lines(args.descriptive)
    model = train_clf(styled, desc, l2=args.l2)
    model.save(args.out)
    if args.cv:
        acc, _ = cross_val_accuracy(styled, desc, folds=args.cv, seed=args.seed, l2=args.l2)
        print(f"cv_accuracy\t{acc:.6f}")


def _load_model(path, kind):
    from .trainer import ManifestError, load_checkpoint
    model = load_checkpoint(path)
    if model.kind != kind:
        raise ManifestError(f"{path} holds a {model.kind} model, expected {kind}")
    return model


def cmd_caption(args):
    from .corpus import STYLE_TOKENS
    from .langgen import generate
    model = _load_model(args.model, "langgen")
    style = STYLE_TOKENS[0] if args.style == "desc" else STYLE_TOKENS[1]
    out, trace_rows = [], []
    for line in _read_lines(args.terms):
        ids, trace = generate(model, model.in_vocab.encode(line.split()), style, args.max_len)
        out.append(" ".join(model.out_vocab.decode(ids)))
        trace_rows += [" ".join(f"{a:.6f}" for a in row) for row in trace.weights] + [""]
    _write_lines(args.out, out)
    if args.trace:
        _write_lines(args.trace, trace_rows)


def cmd_termgen_decode(args):
    from .termgen import termgen_decode
    model = _load_model(args.model, "termgen")
    if args.features.endswith(".npy"):
        feats = np.load(args.features)
        feats = feats[None] if feats.ndim == 1 else feats
    else:
        from .corpus import load_captions
        feats = [r.feature for r in load_captions(args.features, model.cfg.feature_dim, True)]
    _write_lines(args.out, [str(termgen_decode(model, f, args.max_len)) for f in feats])


def cmd_evaluate(args):
    from .corpus import STYLE_TOKENS
    from .langgen import generate_batch
    from .styleval import evaluate
    from .styleval.clf import ClfModel
    from .styleval.ngram import NgramLm
    from .termpipe.pipeline import extract_terms
    model = _load_model(args.model, "langgen")
    terms, refs = [], []
    for line in _read_lines(args.test):
        if not line.strip():
            continue
        term_part, _, ref_part = line.partition("\t")
        terms.append(term_part.split())
        refs.append([extract_terms(r).render() for r in ref_part.split("|") if r.strip()])
    style = STYLE_TOKENS[0] if args.style == "desc" else STYLE_TOKENS[1]
    outs, _ = generate_batch(model, [model.in_vocab.encode(t) for t in terms], style, args.max_len)
    sentences = [model.out_vocab.decode(o) for o in outs]
    report = evaluate(
        sentences,
        lm=NgramLm.load(args.lm) if args.lm else None,
        grulm=_load_model(args.grulm, "grulm") if args.grulm else None,
        clf=ClfModel.load(args.clf) if args.clf else None,
        input_terms=terms,
        references=refs if all(refs) else None,
    )
    text = report.dumps()
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    if args.out:
        _write_lines(args.out, [" ".join(s) for s in sentences])


def cmd_retrieve(args):
    from .styleval.bm25 import Bm25Index, bm25_retrieve
    index_dir = Path(args.index)
    if args.corpus:
        Bm25Index(_read_lines(args.corpus)).save(index_dir)
    index = Bm25Index.load(index_dir)
    for text in bm25_retrieve(args.terms.split(), index, args.n):
        print(text)


def cmd_possel(args):
    from .possel import rank_word_classes, split_corpus, train_denoising_lm
    from .termpipe.pipeline import preprocess_sentence
    corpus = []
    for line in _read_lines(args.corpus):
        toks = [t for t in preprocess_sentence(line) if t.pos != "PUNCT"]
        if toks:
            corpus.append([(t.surface.lower(), t.pos) for t in toks])
    train, held = split_corpus(corpus, 0.1, args.seed)
    dlm = train_denoising_lm(train, _train_config(args), args.drop)
    ranking = rank_word_classes(dlm, held, args.budget, seed=args.seed)
    lines = ["# least -> most important"] + ranking.order + ["# step\tclass\tplacement\tbits"]
    lines += [f"{i}\t{c}\t{p}\t{b:.6f}" for i, (c, p, b) in enumerate(ranking.trace)]
    _write_lines(args.out, lines)
    print("\t".join(ranking.order))


def cmd_gradcheck(args):
    from .gradsuite import run_suite
    worst = 0.0
    for name, err in run_suite(n_shapes=args.shapes, seed=args.seed):
        print(f"{name}\t{err:.3e}")
        worst = max(worst, err)
    print(f"max\t{worst:.3e}")
    if worst >= args.tol:
        from .nncore import NumericError
        raise NumericError(f"gradient check failed: {worst:.3e} >= {args.tol:g}")


# --------------------------------------------------------------------------
# parser

def _train_flags(p):
    p.add_argument("--config", help="JSON file with TrainConfig fields")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--max-steps", dest="max_steps", type=int)


def build_parser():
    parser = _Parser(prog="semstyle", description="Styled caption generation toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random component")
    common.add_argument("--threads", type=int, default=1, help="BLAS threads (1 = reproducible)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(fn=fn)
        return p

    p = add("preprocess", cmd_preprocess, "filter styled text and normalize captions")
    p.add_argument("--styled", required=True)
    p.add_argument("--captions", required=True)
    p.add_argument("--keep-top", dest="keep_top", type=int, default=300)
    p.add_argument("--out", required=True)
    p.add_argument("--split", default="")
    p.add_argument("--select", type=int, default=0, help="keep at most N styled sentences")
    p.add_argument("--feature-dim", dest="feature_dim", type=int, default=2048)
    p.add_argument("--strict", action="store_true", help="fail on malformed lines")

    p = add("terms", cmd_terms, "map sentences to semantic terms")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--mode", choices=("frames", "lempos", "words"), default="frames")
    p.add_argument("--out", default="-")

    p = add("build-vocab", cmd_build_vocab, "build a vocabulary from whitespace-tokenized text")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--cap", type=int, default=20000)
    p.add_argument("--min-count", dest="min_count", type=int, default=1)
    p.add_argument("--style-tokens", dest="style_tokens", action="store_true")
    p.add_argument("--out", required=True)

    p = add("train-termgen", cmd_train_termgen, "train the term generator")
    p.add_argument("--captions", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--feature-dim", dest="feature_dim", type=int, default=2048)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", required=True)
    _train_flags(p)

    p = add("train-langgen", cmd_train_langgen, "train the language generator")
    p.add_argument("--descriptive")
    p.add_argument("--styled")
    p.add_argument("--lexicon")
    p.add_argument("--mode", choices=("joint", "cocoonly", "romonly"))
    p.add_argument("--out", required=True)
    _train_flags(p)

    p = add("train-lm", cmd_train_lm, "train an n-gram or GRU language model")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--discount", type=float, default=0.75)
    p.add_argument("--min-count", dest="min_count", type=int, default=2)
    p.add_argument("--gru", action="store_true", help="train a GRU language model instead")
    p.add_argument("--out", required=True)
    _train_flags(p)

    p = add("train-clf", cmd_train_clf, "train the style classifier")
    p.add_argument("--styled", required=True)
    p.add_argument("--descriptive", required=True)
    p.add_argument("--l2", type=float, default=1.0)
    p.add_argument("--cv", type=int, default=0, help="also report k-fold accuracy")
    p.add_argument("--out", required=True)

    p = add("caption", cmd_caption, "generate sentences from term sequences")
    p.add_argument("--model", required=True)
    p.add_argument("--terms", required=True, help="file with one term sequence per line, or -")
    p.add_argument("--style", choices=("desc", "styled"), default="styled")
    p.add_argument("--max-len", dest="max_len", type=int, default=30)
    p.add_argument("--trace")
    p.add_argument("--out", default="-")

    p = add("termgen-decode", cmd_termgen_decode, "decode term sequences from image features")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True, help=".npy matrix or caption-record file")
    p.add_argument("--max-len", dest="max_len", type=int, default=20)
    p.add_argument("--out", default="-")

    p = add("evaluate", cmd_evaluate, "generate from test terms and score the output")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True, help="lines: terms[TAB]ref sentence|ref sentence")
    p.add_argument("--style", choices=("desc", "styled"), default="styled")
    p.add_argument("--lm")
    p.add_argument("--grulm")
    p.add_argument("--clf")
    p.add_argument("--max-len", dest="max_len", type=int, default=30)
    p.add_argument("--report")
    p.add_argument("--out")

    p = add("retrieve", cmd_retrieve, "BM25 retrieval of styled sentences")
    p.add_argument("--index", required=True)
    p.add_argument("--corpus", help="(re)build the index from this sentence file")
    p.add_argument("--terms", required=True)
    p.add_argument("-n", type=int, default=1)

    p = add("possel", cmd_possel, "rank word classes by importance")
    p.add_argument("--corpus", required=True)
    p.add_argument("--drop", type=float, default=0.66)
    p.add_argument("--budget", type=float, default=0.33)
    p.add_argument("--out", required=True)
    _train_flags(p)

    p = add("gradcheck", cmd_gradcheck, "finite-difference check of every layer")
    p.add_argument("--shapes", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-4)
    return parser


def run(argv=None):
    from .corpus import CorpusError
    from .nncore import NumericError
    from .termpipe.frames import LexiconError
    from .trainer import CheckpointError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    from threadpoolctl import threadpool_limits
    try:
        with threadpool_limits(limits=args.threads):
            args.fn(args)
    except NumericError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except CheckpointError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA
    except (CorpusError, LexiconError, OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"data error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
