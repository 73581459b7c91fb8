"""Elliptic normal curves on complex tori: embeddings, dual discriminants, classification."""

from .torus import Torus, TorusPoint, DivisorClass

__version__ = "0.1.0"

__all__ = ["Torus", "TorusPoint", "DivisorClass", "__version__"]
