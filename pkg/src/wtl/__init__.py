"""Transfer of exponential-rate complexity bounds from linear information to function values.

Modules:

* :mod:`wtl.model_spaces` -- Hilbert model spaces, tensor spectra, exact widths.
* :mod:`wtl.transfer` -- the inequality chain and its explicit constants.
* :mod:`wtl.sampler` -- weighted least-squares recovery and exact worst-case errors.
* :mod:`wtl.tractability` -- exponential tractability classes and diagnostics.
* :mod:`wtl.cli` -- the ``wtl`` command.
"""

__version__ = "0.1.0"
