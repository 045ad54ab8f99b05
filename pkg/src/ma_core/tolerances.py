"""Numerical thresholds shared by every verdict."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """
    Thresholds for the numerical verdicts.

    flat / reject bound the Indeterminate band of the flatness verdict;
    the remaining fields are acceptance thresholds for the individual tests.
    """

    flat: float = 1e-6
    reject: float = 1e-3
    homogeneity_spread: float = 1e-7
    degree_match: float = 1e-6
    radial_affine: float = 1e-6
    linear_inner: float = 1e-7
    identity: float = 1e-9
    profile_det: float = 1e-6
    homothetic_mrs: float = 1e-9
    ode: float = 1e-12
    lemma: float = 1e-8

    def __post_init__(self):
        if not 0 < self.flat <= self.reject:
            raise ValueError(
                f"Need 0 < flat <= reject, got flat={self.flat}, reject={self.reject}"
            )


DEFAULT_TOLERANCES = Tolerances()
