"""Field concentration between nearly touching perfect conductors.

Boundary-integral solves in two dimensions, neck conductance quadrature and
variational bounds, the energy quadratic form in the particle potentials,
and closed-form gap asymptotics, tied together by a sweep harness.
"""
__version__ = "0.1.0"
