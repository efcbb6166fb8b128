"""Polar codes with prescribed affine automorphism groups and automorphism ensemble decoding."""

from .autgroup import EcRepresentative, ec_count, generate_representatives, same_ec
from .construct import CodeProfile, DesignFailure, design, design_profile
from .decode import ae_decode, asc_decode, encode, sc_decode, scl_decode
from .gf2 import AffineTransform, BlockStructure
from .monomial import MonomialSet, block_structure

__version__ = "0.1.0"
