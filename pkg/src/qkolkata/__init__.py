"""Three-player quantum Kolkata restaurant game on entangled qutrits."""

__version__ = "0.1.0"
