"""Exact quotients of multigraded bundles by nilpotent group actions."""

__version__ = "0.1.0"
