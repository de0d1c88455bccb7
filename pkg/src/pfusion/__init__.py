"""Tools for building and classifying saturated fusion systems on split
extensions of a finite abelian p-group by a point stabilizer of order p.

Subpackages are layered bottom-up:

  exactalg  exact linear algebra over Z, Z/p^k and F_p
  grp       finite matrix-group handling and Sylow-p structure
  modrep    F_p-representations and p-adic lattice lifting
  zpmods    finite Z/p^k-module invariants for the classification tables
  fusion    the p-group S, its fusion systems and saturation checks
  classify  scenario runner, catalog and command line entry point
"""

__version__ = "0.1.0"
