"""Feedforward networks with learnable mixtures of base activations.

A layer's activation can be a fixed base function, a learnable linear
combination over an ordered activation library, or a quadratic variant
that adds learnable pairwise products of library members.  The package
bundles the numeric core (deterministic RNG, dense float64 arithmetic),
an MLP with reverse-mode gradients, an Adam training loop, quasi-random
sampling, synthetic benchmark surfaces, a time-series pipeline, and an
experiment harness behind a CLI.
"""

from .activations import BASE_TAGS, Fixed, LinearMix, QuadraticMix
from .network import LayerSpec, Network
from .optim import Adam, TrainConfig, train
from .rng import Rng
from .sampling import HaltonSampler

__all__ = [
    "BASE_TAGS",
    "Fixed",
    "LinearMix",
    "QuadraticMix",
    "LayerSpec",
    "Network",
    "Adam",
    "TrainConfig",
    "train",
    "Rng",
    "HaltonSampler",
]

__version__ = "0.1.0"
