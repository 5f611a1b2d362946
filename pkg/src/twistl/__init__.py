"""Numerics for twists L(s, f x chi) of a level-r Hecke eigenform by Dirichlet
characters mod a prime q: evaluation, argument S(t), zeros, mollifiers and
character-averaged moments."""

__version__ = "0.1.0"
