"""Simulation and analysis toolkit for a planar jellium Coulomb gas.

A gas of n unit charges in the plane confined by the logarithmic potential
of a uniformly charged disc of radius R carrying total opposite charge
alpha.  The package provides exact radial sampling in the determinantal
case beta=2, a Metropolis-adjusted Langevin sampler for general beta,
equilibrium-measure solvers for the low- and high-temperature regimes,
closed-form edge-fluctuation laws, and the statistical machinery used to
cross-validate all of them against each other.
"""

__version__ = "0.1.0"

from .model import EdgeScalings, GasParams

__all__ = ["GasParams", "EdgeScalings", "__version__"]
