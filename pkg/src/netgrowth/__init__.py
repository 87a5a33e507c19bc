"""Network-growth simulation with per-node visibility tracking.

Five attachment kernels (degree-proportional, additive/multiplicative/
general fitness, and spatial), an incremental weighted sampler, exact and
Monte-Carlo visibility oracles, and replica-averaged tracking experiments.
"""

from .analytics import (LemmaReport, SpatialBounds, TolerancePolicy,
                        analytic_expected_change, enumerate_expected_change,
                        mc_expected_change, spatial_marginal_change_mc, verify_lemma)
from .config import ConfigError, RunConfig, parse_config
from .experiments import (ALPHA_GRID, GAMMA_GRID, PRESETS, SPATIAL_RANKS, TOPK_RANKS,
                          ExperimentSpec, InjectedNodeSeries, TrackedSeries,
                          experiment_inject, experiment_spatial, experiment_topk)
from .graph import (FitnessDistribution, GraphState, GrowthSnapshot, NodeRecord,
                    RngStream, continue_growth, grow_step, new_seed_graph, run_growth)
from .io import (dump_snapshot, load_snapshot, load_snapshot_text, save_snapshot,
                 write_lemma_csv, write_series_csv)
from .kernels import (AF, BA, GF, MF, SPATIAL, KernelSpec, StepDecomposition,
                      decomposition, multiplicative_beta, node_weight, node_weights,
                      quadratic_rule, spatial_weights)
from .sampler import WeightIndex, pick_from_weights, sample_spatial
from .visibility import (VisibilityVector, global_visibility_mc, global_visibility_mc_all,
                         local_visibility, local_visibility_all, max_visibility_grid,
                         visibility_nonspatial)

__version__ = "0.1.0"
