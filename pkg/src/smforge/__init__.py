"""smforge: symbolic S-machine workbench.

Rewriting systems whose configurations are group words, the groups they
present, and the van Kampen geometry connecting the two.
"""

from smforge.words import Atom, Word, atom, atoms, free_reduce, EMPTY

__all__ = ["Atom", "Word", "atom", "atoms", "free_reduce", "EMPTY"]

__version__ = "0.1.0"
