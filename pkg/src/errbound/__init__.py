"""Gradient-mapping error bounds and the proximal gradient method.

Instances live in ``core``, mappings and pointwise inequality gaps in
``mappings``, the method and its rate checks in ``solver``, and constant
estimates plus check suites in ``certificates``.
"""

from .core import (FAMILIES, CompositeProblem, CompositionStructure, Polyhedron, Regularizer,
                   SmoothTerm, SolutionSetModel, distance_to_solution_set, make_instance,
                   spectral_norm)
from .errors import (ErrboundError, GenerationError, InputError, ModelError, NumericalError,
                     PreconditionError, SamplingError)
from .mappings import (gradient_mapping, natural_residual, project_polyhedron, prox,
                       prox_gradient_mapping)
from .solver import SolverTrace, run
from .certificates import (chain_theorem1, chain_theorem2, estimate_constant, hoffman_estimate,
                           verify_case_study, verify_chain, verify_pointwise, verify_rates)
from .serialize import load_problem, save_problem

__version__ = "0.1.0"
