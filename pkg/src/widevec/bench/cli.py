"""Command-line benchmark harness.

    widevec-bench filter --resolution 1920x1080 --kernel 3,5,7,9,11,13
    widevec-bench erode  --resolution 1920x1080 --radius 1,2,3
    widevec-bench bow    --train-images 40 --test-images 20 --words 50

Tables go to stdout (or --out); diagnostics (backend capabilities, pinning,
emulation flags, check failures) to stderr.  Exit code is nonzero when any
cell failed its correctness check.

Default variants are SeqScalar and SeqVector; add Optim (and for bow
ParScalar/ParVector) via --variants.  Worker count comes from --threads or
the WIDEVEC_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .. import parallel, vec
from ..filters import BorderPolicy
from .records import BenchVariant
from .runner import (
    BowParams,
    DEFAULT_KERNELS,
    DEFAULT_RADII,
    ErodeParams,
    FilterParams,
    run_benchmark,
)
from .tables import emit

__all__ = ["main", "build_parser"]

_DEFAULT_VARIANTS = "SeqScalar,SeqVector"


def _parse_resolution(s: str) -> tuple[int, int]:
    try:
        w, h = s.lower().split("x")
        w, h = int(w), int(h)
        if w < 1 or h < 1:
            raise ValueError
        return w, h
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad resolution {s!r}, expected WxH") from None


def _parse_int_list(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in s.split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="widevec-bench", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="suite", required=True)

    def common(sp):
        sp.add_argument("--variants", default=_DEFAULT_VARIANTS,
                        help="comma list of SeqScalar,ParScalar,SeqVector,ParVector,Optim")
        sp.add_argument("--repeats", type=int, default=5, help="timed repetitions per cell")
        sp.add_argument("--threads", type=int, default=None, help="worker count for Par variants")
        sp.add_argument("--seed", type=int, default=12345)
        sp.add_argument("--format", choices=("csv", "md"), default="md")
        sp.add_argument("--out", type=Path, default=None, help="write the table here instead of stdout")
        sp.add_argument("--check-only", action="store_true",
                        help="run correctness checks, skip timing")

    f = sub.add_parser("filter", help="Gaussian filtering benchmark")
    f.add_argument("--resolution", type=_parse_resolution, default=(1920, 1080))
    f.add_argument("--kernel", type=_parse_int_list, default=DEFAULT_KERNELS,
                   help="comma list of odd kernel sizes")
    f.add_argument("--border", choices=("reflect101", "replicate"), default="reflect101")
    common(f)

    e = sub.add_parser("erode", help="erosion benchmark")
    e.add_argument("--resolution", type=_parse_resolution, default=(1920, 1080))
    e.add_argument("--radius", type=_parse_int_list, default=DEFAULT_RADII,
                   help="comma list of structuring-element radii")
    common(e)

    b = sub.add_parser("bow", help="bag-of-words + SVM benchmark")
    b.add_argument("--train-images", type=int, default=40)
    b.add_argument("--test-images", type=int, default=20)
    b.add_argument("--words", type=int, default=50, help="dictionary size")
    b.add_argument("--epochs", type=int, default=100, help="SVM training epochs")
    b.add_argument("--cifar", type=Path, default=None,
                   help="CIFAR-10 binary batch for training (synthetic data if omitted)")
    b.add_argument("--cifar-test", type=Path, default=None,
                   help="CIFAR-10 binary batch for testing")
    common(b)
    return p


def _params_for(args) -> object:
    if args.suite == "filter":
        w, h = args.resolution
        return FilterParams(w, h, args.kernel, BorderPolicy.parse(args.border))
    if args.suite == "erode":
        w, h = args.resolution
        return ErodeParams(w, h, args.radius)
    return BowParams(
        train_images=args.train_images,
        test_images=args.test_images,
        k_words=args.words,
        svm_epochs=args.epochs,
        cifar_train=args.cifar,
        cifar_test=args.cifar_test,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        parallel.set_worker_count(args.threads)
    variants = [BenchVariant.parse(v) for v in args.variants.split(",") if v]

    for line in vec.capability_report():
        print(line, file=sys.stderr)
    print(f"threads={parallel.get_worker_count()}", file=sys.stderr)

    try:
        records = run_benchmark(
            args.suite,
            _params_for(args),
            variants,
            repeats=args.repeats,
            seed=args.seed,
            check_only=args.check_only,
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    failed = [r for r in records if not r.ok]
    for r in failed:
        print(f"CHECK FAILED {r.suite} {r.resolution} {r.param} {r.variant}: "
              f"{r.check_failed}", file=sys.stderr)
    if any(r.emulated for r in records):
        print("note: JIT inactive; cells flagged emulated, timings not comparable",
              file=sys.stderr)
    for r in records:
        if r.pinned:
            print(f"pinning=1 ({r.variant})", file=sys.stderr)
            break

    if args.check_only:
        for r in records:
            status = "OK" if r.ok else "FAIL"
            print(f"{status} {r.suite} {r.resolution} {r.param} {r.variant}")
        return 1 if failed else 0

    table = emit(records, "markdown" if args.format == "md" else "csv")
    if args.out is not None:
        args.out.write_bytes(table)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(table.decode("utf-8"))
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
