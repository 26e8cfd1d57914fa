"""Full two-sensor analysis: common variable first, then each sensor's own."""

from dataclasses import dataclass

from .alternating import common_embedding
from .diffusion import Embedding
from .params import PipelineParams
from .specific import specific_embedding


@dataclass
class FusionResult:
    xhat: Embedding
    yhat: Embedding
    zhat: Embedding


def analyze(s1, s2, params=PipelineParams()):
    """Embed the common variable, then the variables specific to sensor 1
    (``yhat``) and sensor 2 (``zhat``) conditioned on it."""
    xhat = common_embedding(s1, s2, params)
    return FusionResult(xhat, specific_embedding(s1, xhat, params), specific_embedding(s2, xhat, params))
