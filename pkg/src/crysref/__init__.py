"""crysref: exact computations for discrete groups generated by affine unitary reflections."""

from .cyclo import CycloField, CycloNum

__all__ = ["CycloField", "CycloNum"]
__version__ = "0.1.0"
