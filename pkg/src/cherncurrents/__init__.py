"""Chern and Segre forms/currents of hermitian metrics on coordinate charts.

Submodules
----------
charclass
    Exact rational symbolic algebra of characteristic classes.
forms
    Exterior calculus of complex (p,q)-forms sampled on polydisc grids.
metrics
    Hermitian metric fields, curvature, Chern forms, catalog examples.
projbundle
    Projectivized-bundle machinery: fiber quadrature, Segre pushforward.
regularize
    Mollification and analytic regularization families with diagnostics.
currents
    Bump-form pairings, simultaneous and iterated regularization limits.
pone / harness / cli
    Two-chart projective-line atlas, experiment orchestration, CLI.
"""

__version__ = "0.1.0"
