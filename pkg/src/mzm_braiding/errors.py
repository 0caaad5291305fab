"""Control-imperfection channels applied to drive protocols.

Three channels, all static within a run (every segment of a protocol suffers
the identical error, which is the regime in which the composite protocol's
first-order cancellation argument applies):

* systematic coefficient errors  c_i -> (1 + eps_i) c_i;
* random per-site multipliers (1 + delta_n) on the defect<->site coupling of
  the defect-adjacent sites, frozen per realization, drawn from a
  counter-based deterministic generator;
* drive-support truncation to a few sites per chain (no renormalisation:
  the lost weight is a genuine physical error).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .drive import DriveProtocol, TruncationSpec

__all__ = [
    "SystematicCoeffError",
    "RandomSiteError",
    "TruncationSpec",
    "apply_systematic",
    "sample_site_errors",
    "apply_site_errors",
    "apply_truncation",
]


@dataclass(frozen=True)
class SystematicCoeffError:
    eps1: float
    eps2: float

    def __post_init__(self) -> None:
        if self.eps1 <= -1 or self.eps2 <= -1:
            raise ValueError("coefficient errors must be > -1")


@dataclass(frozen=True)
class RandomSiteError:
    """Uniform multipliers 1 + delta, delta in [-delta0, delta0], keyed by
    (seed, realization_index, site)."""

    delta0: float
    seed: int
    realization_index: int

    def __post_init__(self) -> None:
        if self.delta0 < 0:
            raise ValueError("delta0 must be >= 0")


def apply_systematic(protocol: DriveProtocol, err: SystematicCoeffError) -> DriveProtocol:
    """Scale c1 by (1 + eps1) and c2 by (1 + eps2) in every segment, without
    renormalising (the physical drive is simply wrong by that much)."""
    segs = tuple(
        replace(
            seg,
            coefficients=replace(
                seg.coefficients,
                c1=seg.coefficients.c1 * (1.0 + err.eps1),
                c2=seg.coefficients.c2 * (1.0 + err.eps2),
            ),
        )
        for seg in protocol.segments
    )
    return DriveProtocol(segments=segs)


def sample_site_errors(err: RandomSiteError, site_list: Iterable[int]) -> dict[int, float]:
    """Multiplier map site -> (1 + delta_n).

    Each site's delta is drawn from its own Philox stream keyed by
    (seed, realization_index, site), so the map is reproducible per site on
    every platform and independent of the order or subset of sites requested.
    """
    out: dict[int, float] = {}
    for site in site_list:
        ss = np.random.SeedSequence(
            entropy=(int(err.seed), int(err.realization_index), int(site))
        )
        gen = np.random.Generator(np.random.Philox(ss))
        delta = gen.uniform(-err.delta0, err.delta0)
        out[int(site)] = 1.0 + float(delta)
    return out


def apply_site_errors(protocol: DriveProtocol, multipliers: dict[int, float]) -> DriveProtocol:
    """Attach frozen per-site multipliers to every segment's drive vector."""
    mult_tuple = tuple(sorted((int(s), float(m)) for s, m in multipliers.items()))
    segs = tuple(replace(seg, site_multipliers=mult_tuple) for seg in protocol.segments)
    return DriveProtocol(segments=segs)


def apply_truncation(protocol: DriveProtocol, spec: TruncationSpec) -> DriveProtocol:
    """Restrict the drive support of every segment to ``spec.radius`` sites
    per chain, counted from the defect-adjacent edges.  Idempotent for equal
    or larger radius."""
    segs = tuple(replace(seg, truncation=spec) for seg in protocol.segments)
    return DriveProtocol(segments=segs)
