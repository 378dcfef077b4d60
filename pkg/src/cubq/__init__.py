"""Laboratory for the cubic family lam*z + b*z^2 + z^3: parameter-plane
slices, orbit-fate classification, parabolic petals, and external rays."""

__version__ = "0.1.0"

from .core import CubicMap, perturb  # noqa: F401
