"""Measured rate exponents vs H with the theoretical broken line."""

import sys

from ._cli import build_parser, run


def main(argv=None) -> int:
    parser = build_parser("plotkit-rates", __doc__, multi=True)
    return run("rate-vs-H", parser.parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
