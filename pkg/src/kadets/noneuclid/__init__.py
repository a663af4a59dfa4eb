"""Checks on the sphere and in the hyperbolic plane."""

from .hyperbolic import (HyperbolicRegion, Mobius, hyperbolic_counterexample_search,
                         hyperbolic_inradius)
from .sphere import (McEstimate, SphericalConvexSet, SphericalPointSet, mc_eps_neighborhood,
                     mc_isoperimetry, mc_star_correlation, spherical_inradius)

__all__ = [
    "HyperbolicRegion",
    "McEstimate",
    "Mobius",
    "SphericalConvexSet",
    "SphericalPointSet",
    "hyperbolic_counterexample_search",
    "hyperbolic_inradius",
    "mc_eps_neighborhood",
    "mc_isoperimetry",
    "mc_star_correlation",
    "spherical_inradius",
]
