"""Simplicial chain complexes from lattices over function fields.

Subpackages are imported lazily by the consumer; the public surface is
re-exported here once at the end of the build.
"""

__version__ = "0.1.0"
