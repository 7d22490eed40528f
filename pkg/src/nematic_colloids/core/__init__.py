"""
Numerical core: Q-tensors, energy densities, shapes, homogenisation, solvers.
"""
