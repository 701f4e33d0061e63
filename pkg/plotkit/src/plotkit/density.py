"""Superposed densities of rescaled errors with a matched Gaussian."""

import sys

from ._cli import build_parser, run


def main(argv=None) -> int:
    parser = build_parser("plotkit-density", __doc__, multi=False,
                          with_rate=True)
    return run("density-superposition", parser.parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
