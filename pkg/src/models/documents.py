from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from src.models.matrices import SpClass
from src.models.orbit import HamiltonianSpec

# "n/a (<reason code>)" when a precondition fails
Scalar = Union[int, str]


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class GeneratorSpec(BaseModel):
    # kept as a plain string so unknown names reach the generator table
    name: str
    params: Dict[str, Any] = {}


class SampleList(BaseModel):
    times: List[float]
    matrices: List[List[float]]  # row-major 2n x 2n


class OrbitSpec(BaseModel):
    z0: Optional[List[float]] = None
    period: Optional[float] = Field(default=None, gt=0)
    circular_radius: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def check_orbit(self):
        explicit = self.z0 is not None and self.period is not None
        if explicit == (self.circular_radius is not None):
            raise ValueError("give either z0 and period, or circular_radius")
        return self


class HamiltonianDocument(BaseModel):
    hamiltonian: HamiltonianSpec
    orbit: OrbitSpec
    reps: int = Field(default=1, ge=1)
    steps: Optional[int] = Field(default=None, ge=16)


class PathSpecDocument(BaseModel):
    """Input of `index`: exactly one of generator, samples, hamiltonian."""

    version: Literal[1] = 1
    label: Optional[str] = None
    generator: Optional[GeneratorSpec] = None
    samples: Optional[SampleList] = None
    hamiltonian: Optional[HamiltonianDocument] = None

    @model_validator(mode="after")
    def check_variant(self):
        given = [v for v in (self.generator, self.samples, self.hamiltonian) if v is not None]
        if len(given) != 1:
            raise ValueError("document needs exactly one of generator, samples, hamiltonian")
        return self


class CheckResult(BaseModel):
    name: str
    status: CheckStatus
    residual: float = 0.0
    detail: str = ""


class IndexReport(BaseModel):
    label: str
    n: int
    tolerance_profile: str
    classification: SpClass
    nu: Scalar
    gutzwiller_mu: Scalar
    mu_rel: Dict[str, Scalar]
    m_rel: Dict[str, Scalar]
    concavity: Scalar
    cz_oracle: Scalar
    cayley: Union[List[List[float]], str]
    cross_check: List[CheckResult] = []


class Reproducer(BaseModel):
    suite: str
    seed: int
    instance: int
    check: str
    residual: float = 0.0
    detail: str = ""


class SuiteSummary(BaseModel):
    suite: str
    seed: int
    count: int
    passed: bool
    checks: Dict[str, int] = {}  # passing instances per check
    skipped: Dict[str, int] = {}
    failures: List[Reproducer] = []
