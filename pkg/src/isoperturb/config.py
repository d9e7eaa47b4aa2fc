from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RunConfig:
    backend: str = "exact"  # exact | bigfloat
    eps_mode: str = "adaptive"  # adaptive | paper_example
    mantissa_bits: int | None = None  # bigfloat override of the precision plan
    seed: int = 0
    output: str = "human"  # human | structured
    guard_sweeps: int = 24  # extra Gauss-Seidel sweeps beyond the resolution budget
    early_exit: bool = True

    def __post_init__(self):
        if self.backend not in ("exact", "bigfloat"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.eps_mode not in ("adaptive", "paper_example"):
            raise ValueError(f"unknown epsilon mode {self.eps_mode!r}")
        if self.output not in ("human", "structured"):
            raise ValueError(f"unknown output format {self.output!r}")
        if self.mantissa_bits is not None and self.mantissa_bits < 16:
            raise ValueError("mantissa width below 16 bits")
        if self.guard_sweeps < 0:
            raise ValueError("guard_sweeps must be non-negative")
