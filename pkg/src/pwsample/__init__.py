"""Reconstruction of bandlimited functions from perturbed-lattice samples.

Submodules: ``nodes`` (perturbed lattice windows), ``kernels`` (SINC and the
smooth oversampling kernel), ``gram`` (Gram sections), ``reconstruct``,
``kadec`` (Riesz-basis criteria), ``biorth`` (biorthogonal functions),
``testfn`` (ground-truth functions) and ``cli``.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import DomainError, IllConditionedError
from .nodes import NodeSet, gen_lattice, gen_perturbed
from .testfn import BandlimitedFn, make_random
from .kernels import SmoothKernel, sinc_pi
from .gram import GramSection, build_section
from .reconstruct import reconstruct_oversampled, reconstruct_sinc, sample

__all__ = [
    "BACKEND",
    "BandlimitedFn",
    "DomainError",
    "GramSection",
    "IllConditionedError",
    "NodeSet",
    "SmoothKernel",
    "build_section",
    "gen_lattice",
    "gen_perturbed",
    "make_random",
    "reconstruct_oversampled",
    "reconstruct_sinc",
    "sample",
    "sinc_pi",
]
