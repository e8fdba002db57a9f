"""Fixed points of (modified) Z-contractions on theta-metric spaces."""

__version__ = "0.1.0"

from .spaces import (EPS_STRICT, EPS_TOL, BAction, CatalogError, DomainError, FiniteDomain,
                     IntervalDomain, ParameterError, ThetaMetricSpace, distance, finite_space,
                     theta_eval)
from .catalog import (AuxFunction, SelfMap, SimulationFunction, make_b_action, make_self_map,
                      make_simulation)
from .axioms import (AxiomReport, AxiomVerdict, SamplePlan, SequencePlan, check_b_action,
                     check_simulation, check_theta_metric)
from .contraction import (MarginReport, contractivity_check, m_value, modified_z_margin,
                          sample_points, z_margin)
from .picard import (FixedPointResult, PicardTrace, asymptotic_regularity, cauchy_diagnostic,
                     picard_iterate, uniqueness_probe)
from .experiment import (ConfigError, Experiment, RunReport, emit_report, emit_trace_csv,
                         experiment_to_text, load_experiment, parse_experiment, run_experiment)

__all__ = [name for name in dir() if not name.startswith("_")]
