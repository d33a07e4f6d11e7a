"""Quantum reference frames for particles on finite Abelian groups."""

from .group import FiniteAbelianGroup, as_group
from .spaces import Basis, KinSpace, Tagged

__version__ = "0.1.0"

__all__ = ["Basis", "FiniteAbelianGroup", "KinSpace", "Tagged", "as_group"]
