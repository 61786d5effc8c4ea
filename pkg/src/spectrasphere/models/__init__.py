"""
One-class models: SVDD, Subspace SVDD and the nonlinear projection trick.
"""
