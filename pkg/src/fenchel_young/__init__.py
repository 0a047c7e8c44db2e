"""Fenchel-Young losses: regularized prediction, losses, proximal operators,
structured prediction and linear training."""

from .entropies import (AssumptionReport, EntropySpec, check_assumptions, entropy_grad,
                        entropy_value, margin_of, pairwise_hinge_entropy, parse_entropy)
from .estimator import FenchelYoungClassifier, LabelProportionEstimator
from .exceptions import (BoundaryGradient, FenchelYoungError, InfeasibleDual, InvalidStructure,
                         NoConvergence, TargetOutsideDomain, UnequalNorms)
from .experiments import MetricsReport, bench_solvers, parse_grid, run_label_proportion
from .losses import (LossSpec, binary_loss, bregman_information, cost_augment, expected_loss,
                     fy_loss, fy_loss_and_grad, fy_loss_grad, js_divergence, kl_divergence,
                     margin_holds, omega_value, parse_loss, regularized_prediction)
from .positive import PHIS, ova_loss, ova_loss_grad, ova_predict
from .prox import ProxSpec, moreau_decompose, prox, prox_spec_for, wright_omega
from .root_finding import RootResult, bisect, brent
from .simplex import (PredictionResult, SolverConfig, argmax_predict, conjugate_value,
                      entmax_tsallis, predict, predict_generic, softmax, sparsemax,
                      temperature_predict)
from .synth import SynthConfig, SynthData, reference_instance, synth_generate
from .training import (Dataset, DualState, Regularizer, TrainResult, dual_ca_step,
                       dual_objective, duality_gap, primal_gradient, primal_objective,
                       recover_primal, soft_threshold, train_dual, train_primal)

__version__ = "0.1.0"
