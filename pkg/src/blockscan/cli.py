"""blockscan command line.

Subcommands: ``index`` a directory of PPM images, ``query`` an index by
example image, ``features`` to dump a per-block feature table, ``inspect``
an index file, ``serve`` the HTTP API.  Diagnostics go to stderr, data to
stdout.  Exit codes: 0 success, 1 usage error, 2 I/O error, 3
data/validation error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .features import FEATURE_DIMS, feature_matrix
from .imaging import BLOCK_SIZE, decode_ppm, partition_blocks
from .pipeline import signature_from_ppm
from .retrieval import filter_by_threshold, rank
from .signature import SignatureIndex, load_index, save_index

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DATA = 3


@dataclass(frozen=True)
class CliConfig:
    """Resolved command options; block_size is fixed by the partition geometry."""

    k: int = 3
    seed: int = 0
    threshold: float | None = None
    top: int | None = None
    output_format: str = "text"
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.threshold is not None and self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")
        if self.top is not None and self.top < 1:
            raise ValueError(f"top must be >= 1, got {self.top}")
        if self.output_format not in ("text", "tsv"):
            raise ValueError(f"output format must be text or tsv, got {self.output_format}")


def _config_from_args(args) -> CliConfig:
    return CliConfig(
        k=getattr(args, "k", None) or 3,
        seed=getattr(args, "seed", 0),
        threshold=getattr(args, "threshold", None),
        top=getattr(args, "top", None),
        output_format=getattr(args, "format", "text"),
    )


class _Parser(argparse.ArgumentParser):
    # argparse defaults to exit code 2 on usage errors; this tool reserves 2 for I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _nonnegative_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blockscan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_index = sub.add_parser("index", help="index a directory of PPM images")
    p_index.add_argument("--input", required=True, help="directory of PPM images")
    p_index.add_argument("--output", required=True, help="index file to write")
    p_index.add_argument("--k", type=_positive_int, default=3, help="clusters per image (default 3)")
    p_index.add_argument("--seed", type=_nonnegative_int, default=0, help="clustering seed (default 0)")
    p_index.set_defaults(func=_cmd_index)

    p_query = sub.add_parser("query", help="rank indexed images against a query image")
    p_query.add_argument("--index", required=True, help="index file")
    p_query.add_argument("--image", required=True, help="query PPM image")
    p_query.add_argument("--top", type=_positive_int, default=None, help="keep only the N best matches")
    p_query.add_argument("--threshold", type=_nonnegative_float, default=None,
                         help="keep only matches with distance <= T")
    p_query.add_argument("--format", choices=("text", "tsv"), default="text")
    p_query.add_argument("--seed", type=_nonnegative_int, default=0,
                         help="clustering seed; must match the index build (default 0)")
    p_query.add_argument("--k", type=_positive_int, default=None,
                         help="expected cluster count; must match the index")
    p_query.set_defaults(func=_cmd_query)

    p_features = sub.add_parser("features", help="dump the per-block feature table as TSV")
    p_features.add_argument("--image", required=True, help="PPM image")
    p_features.set_defaults(func=_cmd_features)

    p_inspect = sub.add_parser("inspect", help="summarize an index file")
    p_inspect.add_argument("--index", required=True, help="index file")
    p_inspect.set_defaults(func=_cmd_inspect)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--index", default=None, help="index file to preload")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def _cmd_index(args) -> int:
    config = _config_from_args(args)
    input_dir = Path(args.input)
    if not input_dir.is_dir():
        print(f"blockscan: error: {input_dir} is not a directory", file=sys.stderr)
        return EXIT_IO
    started = time.perf_counter()
    names = sorted(entry.name for entry in input_dir.iterdir() if entry.is_file())
    signatures = []
    for name in names:
        try:
            data = (input_dir / name).read_bytes()
            signatures.append(signature_from_ppm(data, name, k=config.k, seed=config.seed))
        except (OSError, ValueError) as exc:
            print(f"blockscan: warning: skipping {name}: {exc}", file=sys.stderr)
    if not signatures:
        print("blockscan: error: no image could be indexed", file=sys.stderr)
        return EXIT_DATA
    index = SignatureIndex(k=config.k, dims=FEATURE_DIMS, entries=signatures)
    Path(args.output).write_bytes(save_index(index))
    elapsed = time.perf_counter() - started
    block_counts = sorted({sig.block_count for sig in signatures})
    blocks = (
        str(block_counts[0])
        if len(block_counts) == 1
        else f"{block_counts[0]}..{block_counts[-1]}"
    )
    print(f"indexed {len(signatures)} images ({blocks} blocks per image) in {elapsed:.2f}s")
    return EXIT_OK


def _cmd_query(args) -> int:
    index = load_index(Path(args.index).read_bytes())
    if args.k is not None and args.k != index.k:
        print(
            f"blockscan: error: index was built with k={index.k}, requested k={args.k}",
            file=sys.stderr,
        )
        return EXIT_DATA
    config = _config_from_args(args)
    image_path = Path(args.image)
    query = signature_from_ppm(image_path.read_bytes(), image_path.name, k=index.k, seed=config.seed)
    matches = rank(query, index)
    if config.threshold is not None:
        matches = filter_by_threshold(matches, config.threshold)
    if config.top is not None:
        matches = matches[: config.top]
    if config.output_format == "tsv":
        for match in matches:
            print(f"{match.image_id}\t{match.distance:.6f}")
    else:
        id_width = max((len(m.image_id) for m in matches), default=0)
        for position, match in enumerate(matches, start=1):
            print(f"{position:>4}  {match.image_id:<{id_width}}  {match.distance:.6f}")
    return EXIT_OK


def _cmd_features(args) -> int:
    image = decode_ppm(Path(args.image).read_bytes())
    vectors = feature_matrix(partition_blocks(image))
    print("block\th\ts\tv\thl\tlh\thh")
    for i, fv in enumerate(vectors):
        row = "\t".join(repr(float(x)) for x in (fv.h, fv.s, fv.v, fv.hl, fv.lh, fv.hh))
        print(f"{i}\t{row}")
    return EXIT_OK


def _cmd_inspect(args) -> int:
    index = load_index(Path(args.index).read_bytes())
    print(f"version {index.version}")
    print(f"k {index.k}")
    print(f"dims {index.dims}")
    print(f"entries {len(index.entries)}")
    for entry in index.entries:
        print(f"image {entry.image_id} {entry.block_count}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app()
    if args.index is not None:
        app.state.index = load_index(Path(args.index).read_bytes())
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # raised by argparse for --help (0) and usage errors (1)
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream consumer closed the pipe (e.g. | head); exit quietly
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_IO
    except OSError as exc:
        print(f"blockscan: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"blockscan: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
