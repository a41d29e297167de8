"""Render plan-output files into the three standard figures.

Consumes only the planner's emitted file formats: trace.csv
(iteration,penalized_objective,lambda,binarity_residual), trajectory.csv
(n,x,y), association.csv (n,k,e), and the scenario text file for marker
geometry.  Never imports the planner.
"""

from .io import (FigureInputError, Geometry, Series, read_association,
                 read_scenario_geometry, read_trace, read_trajectory)
from .render import (build_association_figure, build_trace_figure,
                     build_trajectory_figure, save_figure)

__all__ = [
    "FigureInputError", "Geometry", "Series",
    "read_association", "read_scenario_geometry", "read_trace",
    "read_trajectory",
    "build_association_figure", "build_trace_figure",
    "build_trajectory_figure", "save_figure",
]

__version__ = "0.1.0"
