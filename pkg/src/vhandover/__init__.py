"""Cost-based vertical handover decisions over Rayleigh-faded links."""

__version__ = "0.1.0"
