"""Publication-style figures from jellium2d CSV/JSON outputs.

Reads only the files the primary component writes; the single model
quantity recomputed here is the analytic equilibrium radial density
overlay 2 lambda r / R^2 on [0, R/sqrt(lambda)].
"""

__version__ = "0.1.0"

from .render import FigureSpec, render

__all__ = ["FigureSpec", "render", "__version__"]
