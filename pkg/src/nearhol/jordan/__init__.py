"""Numerical Jordan-pair engine for the classical matrix models."""
from .model import JordanPoint, MatrixModel, minor, minor_poly, model_for
from .polymap import PolyMap

__all__ = ["JordanPoint", "MatrixModel", "PolyMap", "minor", "minor_poly", "model_for"]
