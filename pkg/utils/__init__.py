"""
lmoment Utilities Package
Integer/prime infrastructure, special functions, file parsing and report writing
"""

__version__ = "1.0.0"
__author__ = "Gordon Bie"
__project__ = "lmoment"
