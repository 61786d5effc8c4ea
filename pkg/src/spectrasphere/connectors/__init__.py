"""
Readers for scene files.
"""
