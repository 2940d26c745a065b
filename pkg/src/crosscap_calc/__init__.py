"""Exact-arithmetic checks for the level-2 crosscap-slide action on the
homology of non-orientable surfaces: congruence-subgroup presentations,
GF(2) quotient ranks, orthogonal-group computations, braid-word chain
identities, and the Reidemeister-Schreier rewriting of the level-2
generators into the twist subgroup."""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
