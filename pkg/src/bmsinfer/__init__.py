"""Semantic type inference for building-management IoT devices from their time series."""

__version__ = "0.1.0"
