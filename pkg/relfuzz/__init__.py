"""
relfuzz
Coverage-guided fuzzer with size/offset relation inference
"""

__version__ = "1.0.0"
