"""Figure generation for the Euler-Poisson solver's CSV artifacts.

Reads only the documented file interfaces (snapshot CSVs, step-report CSVs,
sweep summaries) and renders deterministic PNG figures from JSON figure
specs; see :mod:`epfigures.figspec` for the schema.
"""

from .figspec import FigureSpec, FigureSpecError, load_spec
from .render import render

__all__ = ["FigureSpec", "FigureSpecError", "load_spec", "render"]

__version__ = "0.1.0"
