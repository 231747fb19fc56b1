"""Self-similar rank-k graphs, Baumslag-Solitar type semigroups and their *-algebras."""

__version__ = "0.1.0"
