"""nexlab: numerical experiments on backward-orbit geometry of quadratic
Julia sets — deepness/density functionals, pullback univalence probing,
and half-line lifting."""

__version__ = "0.1.0"

from .config import ExperimentConfig
from .deepness import (DeepnessProfile, DistanceField, PowerLawFit, delta,
                       deepness_profile, density, distance_transform,
                       fit_power_law)
from .dynamics import (BranchWord, PointCloud, QuadraticMap, RotationNumber,
                       cf_expand, derivative_chain, forward_orbit,
                       inverse_images, is_bounded_type, postcritical_cloud)
from .extension import (BackwardOrbit, LeafTypeReport, PullbackTube,
                        extend_backward, hyperbolic_norm_bounds,
                        leaf_type_report, pullback_tube, regularity_probe,
                        winding_number)
from .feigenbaum import FeigenbaumParameter, derive_feigenbaum_parameter
from .raster import (KRaster, fill_coverage, fill_raster, load_raster,
                     save_raster, write_pgm)
from .rays import (LiftedRay, Ray, branch_separation_experiment,
                   enumerate_lifts, lift_ray, theta_admissible)
from .experiments import cache_roundtrip, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]
