"""Spectral simulation and diagnostics for the one-dimensional
dispersive-dissipative equation family with fractional-Laplacian damping.

Submodules:

* symbols      closed-form Fourier symbols, decay-exponent table
* spectral     periodic grids, transforms, dealiased nonlinearity, norms
* kernel       semigroup kernel evaluation, far-field fits, L^p norms
* evolve       ETDRK2 and mild-solution (fixed point) integrators
* diagnostics  energy identity, Gronwall envelope, decay and profile checks
* illposed     flow-map second-derivative growth scan
* models       named physical presets and initial-datum factories
* refcheck     slow independent oracles for the test suite
* cli          batch command-line front end
"""

__version__ = "0.1.0"
