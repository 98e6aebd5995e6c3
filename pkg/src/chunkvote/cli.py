"""Command line front end.

Every subcommand reads and writes plain text files, takes an optional
``--config`` file of flat ``key = value`` lines and prints to stdout
unless ``-o`` names an output file.  Command line flags override config
values, which override built-in defaults.  Output is deterministic:
running a command twice on the same input gives identical bytes.

Exit codes: 0 success, 1 usage error, 2 bad input data, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .cascade import HEAD_CHOICES, cascade_bracket, cascade_training_corpus
from .corpus import (
    Corpus,
    TagScheme,
    convert_scheme,
    parse_conll,
    parse_nested,
    strip_tags,
    with_tags,
    write_conll,
    write_nested,
)
from .ensemble import (
    VOTING_METHODS,
    best_n_select,
    combine_corpus,
    cv_tuning_table,
    estimate_weights,
    evaluate_subset,
    read_table,
    read_weights,
    stacked_corpus,
    stacked_train,
    write_table,
    write_weights,
)
from .errors import ChunkvoteError, ConfigError
from .learners import LEARNER_KINDS, WEIGHTINGS, LearnerSpec, tag_sentence, train_baseline
from .metrics import format_report, format_report_kv, score_nested, score_tagged
from .model_io import dumps_model, loads_model

STACKED_METHODS = ("stacked-knn", "stacked-knn-pos", "stacked-igtree", "stacked-igtree-pos")
COMBINE_METHODS = VOTING_METHODS + STACKED_METHODS

SCHEMES = ("iob1", "iob2")


class UsageError(Exception):
    """Bad command line; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


#---------------------------------------------------------------------------
# config file handling
#
# Options registered through _setting default to None on the parser; after
# parsing, unset options are filled from the config file and finally from
# the built-in default, so the flag always wins.

def _conv_str(value: str) -> str:
    return value


def _conv_int(value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"expected an integer, got {value!r}") from None


def _conv_float(value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"expected a number, got {value!r}") from None


def _conv_opt_float(value: str) -> float | None:
    if value.lower() == "none":
        return None
    return _conv_float(value)


def _conv_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"expected true or false, got {value!r}")


def _conv_choice(*options: str):
    def convert(value: str) -> str:
        if value not in options:
            raise ConfigError(f"expected one of {options}, got {value!r}")
        return value

    return convert


def _setting(parser, settings, *flags, dest, default, conv, **kwargs):
    parser.add_argument(*flags, dest=dest, default=None, **kwargs)
    settings[dest] = (conv, default)


def _bool_setting(parser, settings, flag, dest, default, help=None):
    parser.add_argument(
        flag, dest=dest, action=argparse.BooleanOptionalAction, default=None, help=help
    )
    settings[dest] = (_conv_bool, default)


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(_read_text(path).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args) -> None:
    settings = args._settings
    values: dict[str, str] = {}
    if args.config is not None:
        for key, value in _load_config(args.config).items():
            if key not in settings:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = value
    for dest, (conv, default) in settings.items():
        if getattr(args, dest) is None:
            setattr(args, dest, conv(values[dest]) if dest in values else default)


#---------------------------------------------------------------------------
# small IO helpers

def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_corpus(path: str, scheme: str, columns: int, strict: bool) -> Corpus:
    return parse_conll(_read_text(path), TagScheme(scheme), columns=columns, strict=strict)


def _parse_system(text: str) -> LearnerSpec:
    name, eq, rest = text.partition("=")
    parts = rest.split(",") if rest else []
    if not eq or not name or not parts or not parts[0]:
        raise UsageError(f"bad --system {text!r}, expected NAME=LEARNER[,key=value,...]")
    converters = {
        "k": _conv_int,
        "iterations": _conv_int,
        "sigma": _conv_opt_float,
        "cutoff": _conv_int,
        "threshold": _conv_float,
        "weighting": _conv_choice(*WEIGHTINGS),
        "io": _conv_bool,
    }
    options = {}
    for part in parts[1:]:
        key, eq, value = part.partition("=")
        if not eq or key not in converters:
            raise UsageError(f"bad --system option {part!r}, known keys: {', '.join(converters)}")
        try:
            options["io_encoding" if key == "io" else key] = converters[key](value)
        except ConfigError as exc:
            raise UsageError(f"--system option {part!r}: {exc}") from None
    try:
        return LearnerSpec(name=name, learner=parts[0], **options)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _parse_pred(text: str) -> tuple[str, str]:
    name, eq, path = text.partition("=")
    if not eq or not name or not path:
        raise UsageError(f"bad --pred {text!r}, expected NAME=PATH")
    return name, path


#---------------------------------------------------------------------------
# subcommands

def _cmd_convert(args) -> None:
    text = _read_text(args.input)
    if args.nested_to_levels:
        corpus = cascade_training_corpus(parse_nested(text), head=args.head)
        _write_text(args.output, write_conll(corpus))
        return
    if args.from_scheme is None or args.to_scheme is None:
        raise UsageError("convert needs --from and --to, or --nested-to-levels")
    source = parse_conll(text, TagScheme(args.from_scheme), columns=3, strict=True)
    sentences = tuple(
        with_tags(
            s,
            convert_scheme(
                s.chunk_tags, TagScheme(args.from_scheme), TagScheme(args.to_scheme)
            ),
        )
        for s in source.sentences
    )
    _write_text(args.output, write_conll(Corpus(sentences, TagScheme(args.to_scheme))))


def _cmd_baseline(args) -> None:
    train = _read_corpus(args.train, args.scheme, 3, strict=True)
    test = _read_corpus(args.test, args.scheme, args.columns, strict=False)
    model = train_baseline(train, io_encoding=args.io_encoding)
    sentences = tuple(with_tags(s, tag_sentence(model, s)) for s in test.sentences)
    _write_text(args.output, write_conll(Corpus(sentences, TagScheme(args.scheme))))


def _cmd_train(args) -> None:
    if args.learner is None:
        raise UsageError("--learner is required")
    try:
        spec = LearnerSpec(
            name="model",
            learner=args.learner,
            k=args.k,
            iterations=args.iterations,
            sigma=args.sigma,
            cutoff=args.cutoff,
            threshold=args.threshold,
            weighting=args.weighting,
            io_encoding=args.io_encoding,
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    corpus = _read_corpus(args.train, args.scheme, 3, strict=True)
    _write_text(args.output, dumps_model(spec.train(corpus)))


def _cmd_tag(args) -> None:
    model = loads_model(_read_text(args.model))
    corpus = _read_corpus(args.input, args.scheme, args.columns, strict=False)
    sentences = tuple(
        with_tags(s, tag_sentence(model, strip_tags(s))) for s in corpus.sentences
    )
    _write_text(args.output, write_conll(Corpus(sentences, TagScheme(args.scheme))))


def _cmd_eval(args) -> None:
    if args.nested:
        gold = parse_nested(_read_text(args.gold))
        pred = parse_nested(_read_text(args.pred))
        report = score_nested(gold, pred, beta=args.beta)
    else:
        gold = parse_conll(_read_text(args.gold), TagScheme.IOB1, columns=3, strict=False)
        pred = parse_conll(_read_text(args.pred), TagScheme.IOB1, columns=3, strict=False)
        report = score_tagged(gold, pred, beta=args.beta)
    _write_text(args.output, format_report_kv(report) if args.kv else format_report(report))


def _cmd_cv_tune(args) -> None:
    if not args.system:
        raise UsageError("at least one --system NAME=LEARNER is required")
    specs = [_parse_system(text) for text in args.system]
    corpus = _read_corpus(args.train, args.scheme, 3, strict=True)
    table = cv_tuning_table(corpus, specs, folds=args.folds)
    _write_text(args.output, write_table(table))


def _cmd_weights(args) -> None:
    table = read_table(_read_text(args.table))
    _write_text(args.output, write_weights(estimate_weights(table)))


def _cmd_combine(args) -> None:
    table = read_table(_read_text(args.table))
    if args.weights is not None and args.tuning is not None:
        raise UsageError("pass --weights or --tuning, not both")
    weights = None
    if args.weights is not None:
        weights = read_weights(_read_text(args.weights))
    elif args.tuning is not None:
        weights = estimate_weights(read_table(_read_text(args.tuning)))
    words = None
    if args.words is not None:
        words = _read_corpus(args.words, "iob1", args.words_columns, strict=False)
    if args.method in STACKED_METHODS:
        if args.bracket_level:
            raise UsageError("bracket level combination works with voting methods only")
        if args.tuning is None:
            raise UsageError(f"method {args.method} needs --tuning")
        tuning = read_table(_read_text(args.tuning))
        base = args.method.removeprefix("stacked-")
        add_pos = base.endswith("-pos")
        model = stacked_train(tuning, learner=base.removesuffix("-pos"), add_pos=add_pos)
        corpus = stacked_corpus(model, table, words=words)
    else:
        if args.method != "majority" and weights is None:
            raise UsageError(f"method {args.method} needs --weights or --tuning")
        if args.bracket_level and args.method != "majority":
            raise UsageError("bracket level combination supports the majority method only")
        corpus = combine_corpus(
            table,
            method=args.method,
            weights=weights,
            bracket_level=args.bracket_level,
            words=words,
        )
    _write_text(args.output, write_conll(corpus))


def _cmd_best_n(args) -> None:
    if args.n is None:
        raise UsageError("-n is required")
    table = read_table(_read_text(args.table))
    names = best_n_select(table, args.n)
    report = evaluate_subset(table, names)
    _write_text(args.output, " ".join(names) + "\n" + f"F {100 * report.f_rate:.2f}\n")


def _cmd_cascade(args) -> None:
    model = loads_model(_read_text(args.model))
    corpus = _read_corpus(args.input, "iob1", args.columns, strict=False)
    nested = [
        cascade_bracket(strip_tags(s), model, max_depth=args.max_depth, head=args.head)
        for s in corpus.sentences
    ]
    _write_text(args.output, write_nested(nested))


def _cmd_report(args) -> None:
    if not args.pred:
        raise UsageError("at least one --pred NAME=PATH is required")
    gold = parse_conll(_read_text(args.gold), TagScheme.IOB1, columns=3, strict=False)
    rows = []
    for name, path in (_parse_pred(text) for text in args.pred):
        pred = parse_conll(_read_text(path), TagScheme.IOB1, columns=3, strict=False)
        rows.append((name, score_tagged(gold, pred, beta=args.beta)))
    width = max(len("system"), max(len(name) for name, _ in rows))
    lines = [f"{'system':<{width}}  {'precision':>9}  {'recall':>9}  {'F':>9}"]
    for name, report in rows:
        overall = report.overall
        lines.append(
            f"{name:<{width}}  {100 * overall.precision:>9.2f}"
            f"  {100 * overall.recall:>9.2f}  {100 * report.f_rate:>9.2f}"
        )
    _write_text(args.output, "\n".join(lines) + "\n")
    if args.tsv is not None:
        tsv = ["system\tfound\tgold\tcorrect\tprecision\trecall\tf"]
        for name, report in rows:
            o = report.overall
            tsv.append(
                f"{name}\t{o.found}\t{o.gold}\t{o.correct}"
                f"\t{o.precision!r}\t{o.recall!r}\t{report.f_rate!r}"
            )
        _write_text(args.tsv, "\n".join(tsv) + "\n")


#---------------------------------------------------------------------------
# parser assembly

def _add_common(sub, settings) -> None:
    sub.add_argument("--config", default=None, help="flat key = value settings file")
    _setting(
        sub, settings, "-o", "--output", dest="output", default=None, conv=_conv_str,
        metavar="PATH", help="output file (default: stdout)",
    )


def _add_scheme(sub, settings, default="iob2") -> None:
    _setting(
        sub, settings, "--scheme", dest="scheme", default=default,
        conv=_conv_choice(*SCHEMES), choices=SCHEMES,
        help=f"tag scheme of the corpus files (default: {default})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chunkvote", description="shallow parsing by system combination")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub = commands.add_parser("convert", help="convert tag schemes or flatten nested files")
    settings: dict = {}
    sub.add_argument("input", help="3 column chunk file, or a nested bracket file")
    _add_common(sub, settings)
    _setting(
        sub, settings, "--from", dest="from_scheme", default=None,
        conv=_conv_choice(*SCHEMES), choices=SCHEMES, help="scheme of the input",
    )
    _setting(
        sub, settings, "--to", dest="to_scheme", default=None,
        conv=_conv_choice(*SCHEMES), choices=SCHEMES, help="scheme of the output",
    )
    _bool_setting(
        sub, settings, "--nested-to-levels", "nested_to_levels", False,
        help="read a nested bracket file, write per level training sentences",
    )
    _setting(
        sub, settings, "--head", dest="head", default="last",
        conv=_conv_choice(*HEAD_CHOICES), choices=HEAD_CHOICES,
        help="token that stands in for a collapsed chunk (default: last)",
    )
    sub.set_defaults(_handler=_cmd_convert, _settings=settings)

    sub = commands.add_parser("baseline", help="tag a file with the per pos-tag majority chunk tag")
    settings = {}
    sub.add_argument("train", help="3 column training file")
    sub.add_argument("test", help="file to tag")
    _add_common(sub, settings)
    _add_scheme(sub, settings)
    _setting(
        sub, settings, "--columns", dest="columns", default=3, conv=_conv_int,
        type=int, choices=(2, 3), help="columns in the test file (default: 3)",
    )
    _bool_setting(
        sub, settings, "--io-encoding", "io_encoding", False,
        help="train on tags with the B/I distinction removed",
    )
    sub.set_defaults(_handler=_cmd_baseline, _settings=settings)

    sub = commands.add_parser("train", help="train a chunker and save the model")
    settings = {}
    sub.add_argument("train", help="3 column training file")
    _add_common(sub, settings)
    _add_scheme(sub, settings)
    _setting(
        sub, settings, "--learner", dest="learner", default=None,
        conv=_conv_choice(*LEARNER_KINDS), choices=LEARNER_KINDS, help="learner kind",
    )
    _setting(sub, settings, "--k", dest="k", default=3, conv=_conv_int, type=int,
             help="nearest neighbour distances to consider (default: 3)")
    _setting(sub, settings, "--iterations", dest="iterations", default=100, conv=_conv_int,
             type=int, help="maximum scaling iterations (default: 100)")
    _setting(sub, settings, "--sigma", dest="sigma", default=None, conv=_conv_opt_float,
             type=float, help="gaussian smoothing width (default: off)")
    _setting(sub, settings, "--cutoff", dest="cutoff", default=2, conv=_conv_int, type=int,
             help="drop features seen fewer times (default: 2)")
    _setting(sub, settings, "--threshold", dest="threshold", default=0.95, conv=_conv_float,
             type=float, help="rule accuracy target (default: 0.95)")
    _setting(
        sub, settings, "--weighting", dest="weighting", default="gain_ratio",
        conv=_conv_choice(*WEIGHTINGS), choices=WEIGHTINGS,
        help="feature weighting (default: gain_ratio)",
    )
    _bool_setting(
        sub, settings, "--io-encoding", "io_encoding", False,
        help="train on tags with the B/I distinction removed",
    )
    sub.set_defaults(_handler=_cmd_train, _settings=settings)

    sub = commands.add_parser("tag", help="tag a file with a saved model")
    settings = {}
    sub.add_argument("model", help="model file written by train")
    sub.add_argument("input", help="file to tag")
    _add_common(sub, settings)
    _add_scheme(sub, settings)
    _setting(
        sub, settings, "--columns", dest="columns", default=3, conv=_conv_int,
        type=int, choices=(2, 3), help="columns in the input file (default: 3)",
    )
    sub.set_defaults(_handler=_cmd_tag, _settings=settings)

    sub = commands.add_parser("eval", help="score predictions against gold chunks")
    settings = {}
    sub.add_argument("gold", help="gold standard file")
    sub.add_argument("pred", help="prediction file")
    _add_common(sub, settings)
    _setting(sub, settings, "--beta", dest="beta", default=1.0, conv=_conv_float,
             type=float, help="weight of recall in the F rate (default: 1.0)")
    _bool_setting(sub, settings, "--kv", "kv", False, help="machine readable key=value output")
    _bool_setting(sub, settings, "--nested", "nested", False,
                  help="score nested bracket files instead of chunk tags")
    sub.set_defaults(_handler=_cmd_eval, _settings=settings)

    sub = commands.add_parser("cv-tune", help="build a tuning table by cross validation")
    settings = {}
    sub.add_argument("train", help="3 column training file")
    sub.add_argument(
        "--system", action="append", metavar="NAME=LEARNER[,key=value,...]",
        help="a system to train; repeat for several",
    )
    _add_common(sub, settings)
    _add_scheme(sub, settings)
    _setting(sub, settings, "--folds", dest="folds", default=10, conv=_conv_int,
             type=int, help="cross validation folds (default: 10)")
    sub.set_defaults(_handler=_cmd_cv_tune, _settings=settings)

    sub = commands.add_parser("weights", help="estimate combiner weights from a tuning table")
    settings = {}
    sub.add_argument("table", help="prediction table with gold tags")
    _add_common(sub, settings)
    sub.set_defaults(_handler=_cmd_weights, _settings=settings)

    sub = commands.add_parser("combine", help="combine the systems of a prediction table")
    settings = {}
    sub.add_argument("table", help="prediction table to combine")
    _add_common(sub, settings)
    _setting(
        sub, settings, "--method", dest="method", default="majority",
        conv=_conv_choice(*COMBINE_METHODS), choices=COMBINE_METHODS,
        help="combination method (default: majority)",
    )
    _setting(sub, settings, "--weights", dest="weights", default=None, conv=_conv_str,
             metavar="PATH", help="combiner weights file")
    _setting(sub, settings, "--tuning", dest="tuning", default=None, conv=_conv_str,
             metavar="PATH", help="tuning table to estimate weights or train stacking on")
    _bool_setting(sub, settings, "--bracket-level", "bracket_level", False,
                  help="vote on chunk starts and ends instead of tags")
    _setting(sub, settings, "--words", dest="words", default=None, conv=_conv_str,
             metavar="PATH", help="corpus supplying the words of the output")
    _setting(
        sub, settings, "--words-columns", dest="words_columns", default=3, conv=_conv_int,
        type=int, choices=(2, 3), help="columns in the words file (default: 3)",
    )
    sub.set_defaults(_handler=_cmd_combine, _settings=settings)

    sub = commands.add_parser("best-n", help="pick the best majority voting subset")
    settings = {}
    sub.add_argument("table", help="prediction table with gold tags")
    _add_common(sub, settings)
    _setting(sub, settings, "-n", dest="n", default=None, conv=_conv_int, type=int,
             help="subset size")
    sub.set_defaults(_handler=_cmd_best_n, _settings=settings)

    sub = commands.add_parser("cascade", help="parse nested chunks bottom-up with a flat model")
    settings = {}
    sub.add_argument("model", help="model file written by train")
    sub.add_argument("input", help="file to parse")
    _add_common(sub, settings)
    _setting(
        sub, settings, "--columns", dest="columns", default=3, conv=_conv_int,
        type=int, choices=(2, 3), help="columns in the input file (default: 3)",
    )
    _setting(sub, settings, "--max-depth", dest="max_depth", default=5, conv=_conv_int,
             type=int, help="nesting levels to try (default: 5)")
    _setting(
        sub, settings, "--head", dest="head", default="last",
        conv=_conv_choice(*HEAD_CHOICES), choices=HEAD_CHOICES,
        help="token that stands in for a collapsed chunk (default: last)",
    )
    sub.set_defaults(_handler=_cmd_cascade, _settings=settings)

    sub = commands.add_parser("report", help="tabulate the scores of several prediction files")
    settings = {}
    sub.add_argument("gold", help="gold standard file")
    sub.add_argument(
        "--pred", action="append", metavar="NAME=PATH",
        help="a prediction file to score; repeat for several",
    )
    _add_common(sub, settings)
    _setting(sub, settings, "--beta", dest="beta", default=1.0, conv=_conv_float,
             type=float, help="weight of recall in the F rate (default: 1.0)")
    _setting(sub, settings, "--tsv", dest="tsv", default=None, conv=_conv_str,
             metavar="PATH", help="also write a tab separated table to PATH")
    sub.set_defaults(_handler=_cmd_report, _settings=settings)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _resolve(args)
        args._handler(args)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ChunkvoteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit:
        raise
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def cli_entry() -> None:
    sys.exit(main())
