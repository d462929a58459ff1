"""
Command-line interface for the simulator.
"""
