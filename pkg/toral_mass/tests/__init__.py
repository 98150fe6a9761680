"""
Test suite for toral-mass
"""
