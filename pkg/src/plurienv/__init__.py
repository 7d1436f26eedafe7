"""Numerical disc envelopes for omega-plurisubharmonic functions.

The supremum side (largest omega-psh minorant of a weight) is computed by a
grid obstacle iteration; the infimum side (disc functional envelope) by
quadrature of disc functionals minimized over analytic-disc families.
"""

from .disc import (AnalyticDisc, DiscTemplate, boundary_samples, constant_disc, disc_derivative,
                   eval_disc, linear_disc, moebius_disc, parameter_pack, parameter_unpack)
from .domains import DomainSpec
from .envelope import EnvelopeEstimate, OptimizerSettings, envelope_at, envelope_field
from .extreal import ExtReal
from .functionals import (FunctionalResult, absorb_phi2, global_potential_shift, omega_functional,
                          poisson_functional)
from .mollify import MollifiedWeight, MollifierConfig, mollified_envelope_check, mollify_value
from .perron import GridFunction, GridSettings, largest_psh_minorant, omega_envelope_oracle
from .potentials import (CurrentSpec, Weight, combined_weight, const, emax, expr_from_json, logabs,
                         modsq, normsq, precompose, smoothmax, translate)
from .riesz import (QuadratureConfig, green_disc, pullback_density, riesz_area, riesz_boundary,
                    riesz_current)
from .scenario import Scenario, load_scenario, scenario_from_json

__version__ = "0.1.0"
