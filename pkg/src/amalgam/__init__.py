"""Amalgams of finite groups and of finite-dimensional star algebras."""

__version__ = "0.1.0"
