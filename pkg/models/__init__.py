"""
lmoment Models Package
Eigenforms, L-function evaluation, Petersson averages, Harper decomposition and moments
"""

__version__ = "1.0.0"
__author__ = "Gordon"
__project__ = "lmoment"
