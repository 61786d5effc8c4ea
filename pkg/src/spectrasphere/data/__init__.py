"""
Scene containers, standardisation and synthetic scenes.
"""
