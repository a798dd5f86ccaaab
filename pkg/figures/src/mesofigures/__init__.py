"""Read-only figure scripts for mesometry CSV sweeps."""

from .fig2 import FigureSpec, plot_fig2
from .fig3 import plot_fig3

__all__ = ["FigureSpec", "plot_fig2", "plot_fig3"]
