"""
horokit: numerical verification of horospherical transforms and Hardy spaces
on the rank-one quadric models.
"""

__version__ = '0.1.0'
