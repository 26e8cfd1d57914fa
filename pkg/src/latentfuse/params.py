"""Pipeline configuration shared by the API and the CLI."""

from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .errors import ParameterError


@dataclass(frozen=True)
class PipelineParams:
    """Knobs for the common and sensor-specific stages.

    k        -- neighbors averaged for each adaptive kernel scale
    m_ad     -- power of the alternating-diffusion kernel before column distances
    m        -- eigenvalue power in the diffusion-map coordinates
    d        -- embedding dimension
    global_eps -- fixed kernel epsilon replacing the adaptive scales
    q        -- neighborhood size in the common embedding
    tau      -- relative eigenvalue cutoff for the truncated pseudo-inverse
    rank     -- fixed pseudo-inverse rank; overrides ``tau`` when set
    center   -- subtract neighborhood means before the Mahalanobis form
    """

    k: int = 16
    m_ad: int = 1
    m: int = 1
    d: int = 2
    global_eps: Optional[float] = None
    q: int = 11
    tau: float = 1e-2
    rank: Optional[int] = None
    center: bool = True

    def __post_init__(self):
        for name in ("k", "m_ad", "m", "d", "q"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value}")
        if self.global_eps is not None and not self.global_eps > 0:
            raise ParameterError(f"global_eps must be positive, got {self.global_eps}")
        if not 0 <= self.tau < 1:
            raise ParameterError(f"tau must lie in [0, 1), got {self.tau}")
        if self.rank is not None and (int(self.rank) != self.rank or self.rank < 1):
            raise ParameterError(f"rank must be a positive integer, got {self.rank}")

    def with_(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return asdict(self)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


# q values come from the three experiments. The tori preset also runs two
# alternating steps, a coarser pinv cutoff and the uncentered form (README)
PRESETS = {
    "tori": PipelineParams(q=11, m_ad=2, tau=0.1, center=False),
    "cameras": PipelineParams(q=15),
    "ecg": PipelineParams(q=21),
}
