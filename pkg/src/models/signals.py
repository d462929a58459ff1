"""
Containers for the per-stage signals of the transmit and receive chains.

Arrays carry one symbol along the last axis; a leading axis holds a batch.
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .schemas import Sap


class FrequencyFrame(BaseModel):
    """Spectrum of one (or a batch of) symbol(s) at the frame-assembly stage."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    x1_branch: np.ndarray = Field(..., description="X1[gamma], gamma = 1..N/2-1")
    x2_branch: np.ndarray = Field(..., description="X2[gamma], gamma = 1..N/2-1")
    combined: np.ndarray = Field(..., description="X_{1,2}[gamma] = X1 + X2")
    theta: Optional[np.ndarray] = Field(None, description="0-based active zeta indices")
    padded_spectrum: Optional[np.ndarray] = Field(None, description="X[sigma] over LN bins")


class TimeSymbol(BaseModel):
    """Time-domain stages of a transmitted symbol."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    bipolar: np.ndarray = Field(..., description="x_BP(n), unit energy")
    clipped: Optional[np.ndarray] = Field(None, description="x_c(n)")
    filtered: Optional[np.ndarray] = Field(None, description="x_F(n)")
    unipolar: np.ndarray = Field(..., description="x_plus(n) >= 0")
    bias: np.ndarray = Field(..., description="beta per symbol")
    scale: np.ndarray = Field(..., description="Normalization gain applied to X[sigma]")

    @property
    def electrical_symbol_energy(self) -> np.ndarray:
        """Sum of |x_plus(n)|^2 per symbol."""
        return np.sum(np.abs(self.unipolar) ** 2, axis=-1)


class DemodResult(BaseModel):
    """Decisions of the two-stage detector."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    theta_hat: np.ndarray = Field(..., description="0-based detected active zeta indices")
    bits_hat: np.ndarray = Field(..., description="lambda1 | lambda2 | lambda3")
    x1_hat: np.ndarray = Field(..., description="IM symbol indices in ascending theta order")
    x2_hat: np.ndarray = Field(..., description="O-OFDM symbol indices per zeta")

    @property
    def sap_hat(self) -> Optional[Sap]:
        """Detected activation pattern of a single symbol, 1-based."""
        if self.theta_hat.ndim != 1 or self.theta_hat.size == 0:
            return None
        return Sap(indices=tuple(int(i) + 1 for i in self.theta_hat))
