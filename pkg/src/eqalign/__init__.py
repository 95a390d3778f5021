"""eqalign: heterogeneous domain adaptation and equipment matching for
sensor time series."""

__version__ = "0.1.0"
