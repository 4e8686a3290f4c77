from dynamics.drift import DriftSpec, MODES, drift, drift_vector, interaction_sum
from dynamics.engine import (IntegratorConfig, Telemetry, TrajectoryBundle, AdaptiveEulerMaruyama, TamedEuler,
                             SCHEMES, create_integrator, evolve)
from dynamics.experiments import stationarity_test, isde_window_experiment, strong_order_report
