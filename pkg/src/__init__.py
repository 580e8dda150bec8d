"""bilattice: quantum emitters in bilayer square-lattice photonic baths."""

__version__ = "0.3.0"
