"""
lmoment Services Package
Run configuration and ordered family evaluation
"""

__version__ = "1.0.0"
__author__ = "Gordon"
__project__ = "lmoment"
