"""Maximum profit pickup routing with time windows and a vehicle capacity."""

from .binpacking import Packing, pack_aptas, pack_exact, pack_ffd, pack_mffd
from .errors import (IncompleteCacheError, InfeasibleSolutionError, ItemTooLargeError, MetricError, MppcError,
                     ParameterError, ParseError, SizeLimitError, StructuralError, ValidationError)
from .evaluation import (EvaluationReport, brute_force_optimum, evaluate, parse_report, render_report,
                         upper_bound)
from .generator import GeneratorSpec, generate_instance
from .geojson import export_geojson
from .instance import (AssumptionParams, Instance, Route, Site, Solution, Violation, check_feasibility,
                       compute_profit, dumps_instance, dumps_solution, load_instance, load_solution,
                       make_route, validate_assumptions)
from .metric import DistanceMatrix, import_directions_cache
from .orienteering import (OrienteeringQuery, bucket_by_deadline, repair_route, solve_bucketed,
                           solve_exact_dp, solve_insertion, solve_route)
from .pipelines import SolverConfig, run_algorithm1, run_algorithm2, run_algorithm3, solve
from .wspd import build_split_tree, calibrate_separation, compute_wspd

__version__ = "0.1.0"
