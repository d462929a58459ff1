"""
Test suite for the optical OFDM / OFDM-IM simulator.
"""

# This file makes the tests directory a Python package
