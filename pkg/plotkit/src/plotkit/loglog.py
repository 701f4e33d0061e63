"""Log-log RMSE panel: one row per estimand, reported slope annotated."""

import sys

from ._cli import build_parser, run


def main(argv=None) -> int:
    parser = build_parser("plotkit-loglog", __doc__, multi=False)
    return run("loglog-rmse", parser.parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
