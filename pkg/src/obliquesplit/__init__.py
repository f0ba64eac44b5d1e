"""Structured-noise filtering by oblique projection and sparse pursuit."""

from .errors import (DegenerateFamily, DimensionMismatch, NotOrthonormal,
                     StabilityStop, SubspaceIntersection)
from .hilbert import (AtomFamily, GramMatrix, SpaceSpec, gram, inner, norm,
                      orthonormalize, project_orthogonal, space_euclidean,
                      space_trapezoid)
from .oblique import (ObliqueProjector, TruncatedProjector, apply_projector,
                      build_oblique_projector, complement_family,
                      measurement_vectors, min_angle, truncate_projector)
from .pursuit import (PursuitConfig, PursuitResult, PursuitState,
                      backward_step, consistency_error, forward_step,
                      init_state, oblique_pursuit, prepare_families,
                      select_backward, select_forward, swap_refine)
from .dictionaries import (GroundTruth, SplineSpec, bspline_family,
                           cosine_family, gaussian_background,
                           power_background, random_instance)
from .bench import (ExperimentConfig, ExperimentReport, emit_outputs,
                    run_experiment, truncated_svd_baseline)

__version__ = "0.1.0"
