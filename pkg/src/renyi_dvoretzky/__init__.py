"""Random quantum channels, Schatten norms and Dvoretzky-type concentration.

Numerical experiments on the maximum output p-norm of Haar random channels
and its failure to be multiplicative under tensor products with the
conjugate channel, together with Monte Carlo checks of how Schatten
q-norms concentrate on random subspaces of d x d matrices.

Example:

    from renyi_dvoretzky import run_violation
    report = run_violation(p=3, d=16, seed=1)
    print(report.summary_line())
"""

__version__ = "0.1.0"

from .channels import (PartialTraceChannel, apply, certified_product_lower_bounds,
                       conjugate_channel, kraus_from_isometry, maximally_entangled_state,
                       product_channel_on_max_entangled)
from .dvoretzky import (dvoretzky_dimension, estimate_M, shrinking_experiment,
                        window_experiment)
from .ensembles import (Isometry, RngStream, complex_gaussian_matrix, haar_isometry,
                        hs_sphere_point, random_subspace_basis)
from .entropy import entropy_from_p_norm, renyi_entropy
from .linalg import (DensityMatrix, PureState, hermitian_eigenvalues, partial_trace_2,
                     schatten_norm, schmidt_coefficients, tensor_product, vec_to_matrix)
from .optimize import (AscentConfig, estimate_max_output_norm, output_p_norm_at,
                       ratio_gradient, subspace_norm_window)
from .violation import ScanGrid, critical_m, run_scan, run_violation
