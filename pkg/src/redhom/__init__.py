"""redhom: exact homological computations over Artinian local algebras.

Finite-dimensional commutative local algebras over a prime field or the
rationals; finitely generated modules as explicit matrix representations;
minimal free resolutions, Ext, duals and pushforwards; construction,
verification, bounded search and degree-shifting transforms of reducing
certificates for projective and Gorenstein homological dimension.
"""

__version__ = "0.1.0"

from .linalg import Field, Matrix, QQ, GF2, GF3

__all__ = ["Field", "Matrix", "QQ", "GF2", "GF3", "__version__"]
