"""
Pydantic schemas for modem, channel and simulation parameters.
"""

import math
from enum import Enum
from typing import Any, List, Literal, Optional, Tuple, Union

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    computed_field,
    field_validator,
    model_validator,
)
from typing_extensions import Annotated

SPEED_OF_LIGHT = 299_792_458.0


def is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


class Scheme(str, Enum):
    """Modulation scheme families built on the common transmitter framework."""

    DCO = "DCO"
    ACO = "ACO"
    DCO_IM = "DCO-IM"
    ACO_IM = "ACO-IM"
    HYBRID_ACO = "HYBRID-ACO"
    HYBRID_DCO = "HYBRID-DCO"

    @property
    def is_aco(self) -> bool:
        return self in (Scheme.ACO, Scheme.ACO_IM, Scheme.HYBRID_ACO)

    @property
    def has_im(self) -> bool:
        return self not in (Scheme.DCO, Scheme.ACO)

    @property
    def has_ofdm(self) -> bool:
        return self not in (Scheme.DCO_IM, Scheme.ACO_IM)

    @property
    def is_filtered(self) -> bool:
        return self is Scheme.HYBRID_ACO


def omega_for(scheme: Scheme, n: int) -> int:
    """Number of IM-eligible subcarriers: N/4 for the ACO family, N/2-1 for DCO."""
    return n // 4 if scheme.is_aco else n // 2 - 1


def _check_cardinality(value: int) -> int:
    if value < 2 or not is_power_of_two(value):
        raise ValueError(f"alphabet cardinality must be a power of two >= 2, got {value}")
    return value


Cardinality = Annotated[int, AfterValidator(_check_cardinality)]


class ImConfig(BaseModel):
    """Index-modulation parameters of one symbol."""

    model_config = ConfigDict(frozen=True)

    omega: int = Field(..., ge=1, description="IM-eligible subcarriers")
    kappa: int = Field(..., ge=1, description="Active subcarriers")
    m1: Cardinality = Field(default=4, description="Alphabet size of the IM branch")
    m2: Cardinality = Field(default=4, description="Alphabet size of the O-OFDM branch")

    @model_validator(mode="after")
    def _kappa_within_omega(self) -> "ImConfig":
        if self.kappa > self.omega:
            raise ValueError(f"kappa ({self.kappa}) exceeds omega ({self.omega})")
        return self


class BitBudget(BaseModel):
    """Bits carried per symbol by each branch."""

    model_config = ConfigDict(frozen=True)

    lambda1: int = Field(..., ge=0, description="Bits conveyed by the activation pattern")
    lambda2: int = Field(..., ge=0, description="Bits on the active IM subcarriers")
    lambda3: int = Field(..., ge=0, description="Bits on the O-OFDM subcarriers")

    @computed_field
    @property
    def lambda_total(self) -> int:
        return self.lambda1 + self.lambda2 + self.lambda3


class Sap(BaseModel):
    """Subcarrier activation pattern, 1-based and ascending."""

    model_config = ConfigDict(frozen=True)

    indices: Tuple[int, ...]

    @field_validator("indices")
    @classmethod
    def _strictly_increasing(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value:
            raise ValueError("activation pattern must not be empty")
        if value[0] < 1:
            raise ValueError("subcarrier indices are 1-based")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError(f"indices must be strictly increasing, got {value}")
        return value

    @property
    def kappa(self) -> int:
        return len(self.indices)


class ConstellationPair(BaseModel):
    """Geometry of the two PSK rings (outer ring carries the IM branch)."""

    model_config = ConfigDict(frozen=True)

    m1: Cardinality = 4
    m2: Cardinality = 4
    r2: float = Field(default=1.0, gt=0, description="Radius of the O-OFDM ring")
    d_min: float = Field(default=2.0, gt=0, description="Ring separation parameter")

    @computed_field
    @property
    def r1(self) -> float:
        return self.r2 + self.d_min


class BinIndexSet(BaseModel):
    """Positive/negative data bins of an LN-point spectrum."""

    model_config = ConfigDict(frozen=True)

    positive_bins: Tuple[int, ...]
    negative_bins: Tuple[int, ...]
    dc_bin: int = 0
    total_bins: int


class ModemConfig(BaseModel):
    """Full parameterization of one scheme instance."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scheme: Scheme = Field(default=Scheme.HYBRID_ACO)
    n: int = Field(default=32, description="Subcarrier count N")
    l: int = Field(default=4, ge=1, description="Oversampling factor L")
    m1: Cardinality = Field(default=4, description="IM-branch alphabet size")
    m2: Cardinality = Field(default=4, description="O-OFDM-branch alphabet size")
    kappa: Optional[int] = Field(default=None, description="Active subcarriers; None resolves automatically")
    kappa_search: Literal["approx", "exhaustive"] = "approx"
    alpha: int = Field(default=0, description="Low-pass filter excess bins (HYBRID-ACO only)")
    dco_bias_factor: float = Field(default=3.0, ge=0, description="DC bias in units of std(x_BP)")
    r2: float = Field(default=1.0, gt=0)
    d_min: float = Field(default=2.0, gt=0)
    data_rate_bps: float = Field(default=500e6, gt=0)
    normalization: Literal["symbol", "ensemble"] = "symbol"
    bandwidth_convention: Literal["occupied", "nominal"] = "occupied"

    @field_validator("n")
    @classmethod
    def _check_n(cls, value: int) -> int:
        if value < 8 or not is_power_of_two(value):
            raise ValueError(f"N must be a power of two >= 8, got {value}")
        return value

    @field_validator("l")
    @classmethod
    def _check_l(cls, value: int) -> int:
        if not is_power_of_two(value):
            raise ValueError(f"L must be a power of two so that LN is one, got {value}")
        return value

    @model_validator(mode="before")
    @classmethod
    def _resolve_kappa(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if data.get("kappa") == "auto":
            data["kappa"] = None
        try:
            scheme = Scheme(data.get("scheme", Scheme.HYBRID_ACO))
            n = int(data.get("n", 32))
            m1 = int(data.get("m1", 4))
        except (TypeError, ValueError):
            return data  # field validation reports the problem
        if not scheme.has_im:
            data["kappa"] = 0
        elif data.get("kappa") is None and n >= 8 and m1 >= 2:
            # services.mapping imports this module
            from services.mapping import kappa_approx, kappa_exhaustive

            omega = omega_for(scheme, n)
            if data.get("kappa_search", "approx") == "exhaustive":
                data["kappa"] = kappa_exhaustive(m1, omega)
            else:
                data["kappa"] = kappa_approx(m1, omega)
        return data

    @model_validator(mode="after")
    def _check_consistency(self) -> "ModemConfig":
        if self.scheme.has_im and not 1 <= self.kappa <= self.omega:
            raise ValueError(f"kappa must lie in [1, {self.omega}] for {self.scheme.value}, got {self.kappa}")
        if self.scheme.is_filtered:
            if not 0 <= self.alpha <= self.n // 2:
                raise ValueError(f"alpha must lie in [0, {self.n // 2}], got {self.alpha}")
        elif self.alpha != 0:
            raise ValueError(f"alpha applies only to filtered schemes, got {self.alpha} for {self.scheme.value}")
        return self

    @property
    def omega(self) -> int:
        return omega_for(self.scheme, self.n)

    @property
    def ln(self) -> int:
        return self.l * self.n

    @property
    def gain(self) -> float:
        """Receiver extraction gain g compensating the clipping halving."""
        return 2.0 if self.scheme.is_aco else 1.0

    @property
    def gamma(self) -> List[int]:
        """Subcarrier index gamma for each zeta = 1..omega."""
        if self.scheme.is_aco:
            return [2 * zeta - 1 for zeta in range(1, self.omega + 1)]
        return list(range(1, self.omega + 1))

    @property
    def im_config(self) -> Optional[ImConfig]:
        if not self.scheme.has_im:
            return None
        return ImConfig(omega=self.omega, kappa=self.kappa, m1=self.m1, m2=self.m2)

    @property
    def pair(self) -> ConstellationPair:
        return ConstellationPair(m1=self.m1, m2=self.m2, r2=self.r2, d_min=self.d_min)

    def label(self) -> str:
        parts = [self.scheme.value, f"N={self.n}", f"M1={self.m1}" if self.scheme.has_im else None]
        if self.scheme.has_ofdm:
            parts.append(f"M2={self.m2}")
        if self.scheme.has_im:
            parts.append(f"k={self.kappa}")
        if self.scheme.is_filtered:
            parts.append(f"a={self.alpha}")
        return " ".join(p for p in parts if p)


class CeilingBounceParams(BaseModel):
    """Diffuse indoor channel parameterized by RMS delay spread or ceiling height."""

    model_config = ConfigDict(frozen=True)

    rms_delay_spread: Optional[float] = Field(default=10e-9, gt=0, description="Seconds")
    ceiling_height: Optional[float] = Field(default=None, gt=0, description="Metres")
    path_loss: float = Field(default=1.0, description="Optical path loss, normalised")
    speed_of_light: float = SPEED_OF_LIGHT

    @model_validator(mode="after")
    def _one_parameter(self) -> "CeilingBounceParams":
        if self.rms_delay_spread is None and self.ceiling_height is None:
            raise ValueError("either rms_delay_spread or ceiling_height is required")
        if self.path_loss != 1.0:
            raise ValueError("path loss is normalised to 1")
        return self

    @property
    def rho(self) -> float:
        if self.ceiling_height is not None:
            return 2.0 * self.ceiling_height / self.speed_of_light
        return 12.0 * self.rms_delay_spread / math.sqrt(13.0 / 11.0)

    @property
    def delay_spread(self) -> float:
        return self.rho / 12.0 * math.sqrt(13.0 / 11.0)


class ChannelModel(BaseModel):
    """Channel selection for a simulation run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["los", "ceiling-bounce"] = "los"
    rms_delay_spread_s: Optional[float] = Field(default=10e-9, gt=0)
    ceiling_height_m: Optional[float] = Field(default=None, gt=0)
    cp_length: Optional[int] = Field(default=None, ge=0, description="None covers cp_energy_fraction of the taps")
    cp_energy_fraction: float = Field(default=0.999, gt=0, le=1)

    @property
    def ceiling_bounce(self) -> CeilingBounceParams:
        if self.ceiling_height_m is not None:
            return CeilingBounceParams(rms_delay_spread=None, ceiling_height=self.ceiling_height_m)
        return CeilingBounceParams(rms_delay_spread=self.rms_delay_spread_s)

    def label(self) -> str:
        if self.kind == "los":
            return "los"
        return f"ceiling-bounce({self.ceiling_bounce.delay_spread * 1e9:.3g}ns)"


class NoiseModel(BaseModel):
    """Discrete-time AWGN calibrated from a one-sided spectral density."""

    model_config = ConfigDict(frozen=True)

    n0: float = Field(..., ge=0, description="Mono-lateral noise spectral density")
    sample_period: float = Field(..., gt=0, description="T_c = T_s / LN in seconds")

    @property
    def per_sample_variance(self) -> float:
        return self.n0 / (2.0 * self.sample_period)


class BerResult(BaseModel):
    """Monte-Carlo tally at one Eb/N0 point."""

    bits_sent: int = Field(default=0, ge=0)
    bit_errors: int = Field(default=0, ge=0)
    ebn0_db: float

    @computed_field
    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    @computed_field
    @property
    def std_error(self) -> float:
        if not self.bits_sent:
            return 0.0
        return math.sqrt(self.ber * (1.0 - self.ber) / self.bits_sent)


CSV_COLUMNS = [
    "scenario",
    "scheme",
    "N",
    "L",
    "M1",
    "M2",
    "kappa",
    "alpha",
    "channel",
    "ebn0_db",
    "ber",
    "se_bits_per_s_per_hz",
    "seed",
]


class SweepRecord(BaseModel):
    """One output row; field order is the CSV column order."""

    model_config = ConfigDict(populate_by_name=True)

    scenario: str
    scheme: str
    n: int = Field(..., alias="N")
    l: int = Field(..., alias="L")
    m1: int = Field(..., alias="M1")
    m2: int = Field(..., alias="M2")
    kappa: int
    alpha: int
    channel: str
    ebn0_db: Optional[float] = None
    ber: Optional[float] = None
    se_bits_per_s_per_hz: float
    seed: int
    mean_bias: Optional[float] = Field(default=None, exclude=True, description="Summary only")

    def to_row(self) -> dict:
        row = self.model_dump(by_alias=True)
        return {column: row[column] for column in CSV_COLUMNS}


class ScenarioSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Literal["se-sweep", "se-ee", "ber-curve", "selftest"]
    seed: int = Field(default=0, ge=0, lt=2**64)
    output: str = "results"
    jobs: int = Field(default=1, ge=1)


class _ModemFields(BaseModel):
    """Fields shared by the main modem section and the baselines."""

    model_config = ConfigDict(extra="forbid")

    scheme: Scheme = Scheme.HYBRID_ACO
    m1: int = 4
    m2: int = 4
    kappa: Union[int, Literal["auto"]] = "auto"
    kappa_search: Literal["approx", "exhaustive"] = "approx"
    kappa_range: Optional[List[int]] = Field(default=None, description="se-sweep only; default 1..omega")
    alpha: List[int] = Field(default_factory=lambda: [0])
    dco_bias_factor: float = 3.0
    normalization: Literal["symbol", "ensemble"] = "symbol"
    bandwidth_convention: Literal["occupied", "nominal"] = "occupied"


class ModemSection(_ModemFields):
    n: int = 32
    l: int = 4
    r2: float = 1.0
    d_min: float = 2.0
    data_rate_bps: float = 500e6

    @model_validator(mode="after")
    def _build_all(self) -> "ModemSection":
        _validate_modem_configs(self, self)
        return self


class BaselineSection(_ModemFields):
    scheme: Scheme


class SimulationSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ebn0_db: List[float] = Field(default_factory=lambda: [float(v) for v in range(0, 21, 2)])
    target_ber: float = Field(default=1e-3, gt=0, lt=0.5)
    min_errors: Optional[int] = Field(default=None, ge=1)
    max_bits: Optional[int] = Field(default=None, ge=1)
    ebn0_search_min: float = 0.0
    ebn0_search_max: float = 50.0
    bias_symbols: int = Field(default=1000, ge=1)

    @model_validator(mode="after")
    def _search_range(self) -> "SimulationSection":
        if self.ebn0_search_max <= self.ebn0_search_min:
            raise ValueError("ebn0_search_max must exceed ebn0_search_min")
        return self


class ScenarioConfig(BaseModel):
    """A complete scenario file."""

    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioSection
    modem: ModemSection = Field(default_factory=ModemSection)
    channel: ChannelModel = Field(default_factory=ChannelModel)
    simulation: SimulationSection = Field(default_factory=SimulationSection)
    baseline: List[BaselineSection] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_baselines(self) -> "ScenarioConfig":
        for index, baseline in enumerate(self.baseline):
            try:
                _validate_modem_configs(baseline, self.modem)
            except ValueError as e:
                raise ValueError(f"baseline[{index}].{e}") from e
        return self

    def modem_configs(self) -> List[ModemConfig]:
        """Main configuration expanded over its alpha list."""
        return _expand(self.modem, self.modem)

    def baseline_configs(self) -> List[ModemConfig]:
        configs: List[ModemConfig] = []
        for baseline in self.baseline:
            configs.extend(_expand(baseline, self.modem))
        return configs

    def all_configs(self) -> List[ModemConfig]:
        return self.modem_configs() + self.baseline_configs()

    def groups(self) -> List[Tuple[Optional[List[int]], List[ModemConfig]]]:
        """(kappa_range, configurations) of the main section and of each baseline."""
        groups = [(self.modem.kappa_range, self.modem_configs())]
        for baseline in self.baseline:
            groups.append((baseline.kappa_range, _expand(baseline, self.modem)))
        return groups


def _expand(fields: _ModemFields, shared: ModemSection) -> List[ModemConfig]:
    return [_build(fields, shared, alpha) for alpha in fields.alpha]


def _build(fields: _ModemFields, shared: ModemSection, alpha: int, kappa: Optional[int] = None) -> ModemConfig:
    return ModemConfig(
        scheme=fields.scheme,
        n=shared.n,
        l=shared.l,
        m1=fields.m1,
        m2=fields.m2,
        kappa=kappa if kappa is not None else fields.kappa,
        kappa_search=fields.kappa_search,
        alpha=alpha,
        dco_bias_factor=fields.dco_bias_factor,
        r2=shared.r2,
        d_min=shared.d_min,
        data_rate_bps=shared.data_rate_bps,
        normalization=fields.normalization,
        bandwidth_convention=fields.bandwidth_convention,
    )


def _validate_modem_configs(fields: _ModemFields, shared: ModemSection) -> None:
    """Build every configuration the section implies and report the first field at fault."""
    kappas = list(fields.kappa_range or [])
    for alpha in fields.alpha or [0]:
        for kappa in [None] + kappas:
            try:
                _build(fields, shared, alpha, kappa)
            except ValidationError as e:
                error = e.errors()[0]
                message = strip_value_error(error["msg"])
                field = ".".join(str(part) for part in error["loc"]) or _guess_field(message)
                if kappa is not None and field == "kappa":
                    field = "kappa_range"
                raise ValueError(f"{field}: {message}") from None


def strip_value_error(message: str) -> str:
    return message.split("Value error, ", 1)[-1]


def _guess_field(message: str) -> str:
    text = message.lower()
    for field in ("kappa", "alpha", "n", "l", "m1", "m2"):
        if text.startswith(field + " "):
            return field
    return "scheme"
