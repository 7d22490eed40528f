"""
Test suite for nematic-colloids.
"""
