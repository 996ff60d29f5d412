"""
lmoment Commands Package
One module per CLI subcommand
"""

__version__ = "1.0.0"
__author__ = "Gordon"
__project__ = "lmoment"
