"""Executable versions of the explicit constructions and counterexamples."""

from .aset import aset_contains, aset_members_upto, naive_aset_contains
from .certificate import WitnessCertificate, replay_certificate
from .g2 import g2_group
from .gamma import soluble_gamma
from .witnesses import ortho_even_witness, ortho_odd_witness, sp4_witness

__all__ = [
    "WitnessCertificate",
    "aset_contains",
    "aset_members_upto",
    "g2_group",
    "naive_aset_contains",
    "ortho_even_witness",
    "ortho_odd_witness",
    "replay_certificate",
    "soluble_gamma",
    "sp4_witness",
]
