"""
Simulation and analysis of two gravitationally coupled optomechanical
cavities.
"""

__version__ = '0.1.0'
