# This file makes the padicla directory a Python package

__version__ = "0.1.0"
