"""Kronecker-structured joint active/passive beamforming for IRS-assisted MIMO links."""

__version__ = "0.1.0"
