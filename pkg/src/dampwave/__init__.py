"""Fourier-space laboratory for u_tt - Lap u - mu(|D|) Lap u_t = 0.

Kernels, radial norms and decay-rate experiments for a pluggable damping
symbol mu(r), with an RK4 oracle for cross-checking the closed forms.
"""
from .decay import (AlphaQuery, DecayClass, DecayFit, LossReport, ProblemSetup, Quantity,
                    ScenarioSpec, alpha_sup, fit_decay, norm_series, regularity_loss_probe,
                    run_scenario, theorem_scenarios)
from .oracle import (EnergyFunctionals, ModeState, check_dissipation_inequality,
                     energy_functionals, oracle_check, rk4_mode)
from .quadrature import (NormRequest, RadialProfile, multiplier_large_factor,
                         multiplier_small_norm, radial_l2)
from .spectral import (CharRoots, KernelValue, Regime, Zone, ZonePartition, char_roots,
                       fourier_solution, kernels, key_rho, zone_of)
from .symbols import (HypothesisReport, ProbeConfig, RegularityClass, SymbolSpec,
                      builtin_catalog, check_hypotheses, eval_mu, make_symbol, parse_symbol)

__version__ = "0.1.0"
