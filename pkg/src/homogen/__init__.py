"""Finite tools for automorphism groups of homogeneous structures.

Modules: ``core`` (structures, embeddings, automorphisms), ``perms``
(permutation groups and actions), ``classd`` (the class D), ``actions``
(invariant D-structures on G-sets), ``builder`` (the universal-action
construction), ``tower`` (Rado tower), ``witness`` (group-extensibility and
the counterexamples) and ``cli``.
"""
from .core import Structure
from .errors import CapacityError, HomogenError, InputError, IntegrityError, Verdict
from .perms import GroupAction, Permutation, PermGroup

__version__ = "0.1.0"

__all__ = ["Structure", "Permutation", "PermGroup", "GroupAction", "Verdict",
           "HomogenError", "InputError", "CapacityError", "IntegrityError"]
