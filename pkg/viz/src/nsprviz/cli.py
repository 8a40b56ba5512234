"""``nspr-plot`` entry point: render one figure from run/suite artifacts."""

from __future__ import annotations

import sys

import click

from .data import ColumnError
from .plots import PLOT_KINDS, render


@click.command()
@click.argument("kind", type=click.Choice(sorted(PLOT_KINDS)))
@click.option("--in", "paths", "-i", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Input CSV/JSONL file (repeatable).")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output image path (.png or .svg).")
def main(kind, paths, out):
    """Render a figure of the given KIND from nested-sampling outputs."""
    try:
        render(kind, paths, out)
    except (ColumnError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
