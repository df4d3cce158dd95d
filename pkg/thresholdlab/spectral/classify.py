"""Eigenvalue or resonance decisions for threshold poles."""

from __future__ import annotations

from typing import Any, Mapping, Optional, Sequence

from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import PoleExpansion, RadiatingCoefficients, SpectralPrediction
from thresholdlab.core.utils import sign_with_band, zero_band

from .asymptotics import CASE_FRACTIONAL, lambda_series_coefficients

LOGGER = get_logger(__name__)


def _fractional_signs(pole: PoleExpansion, rel: float) -> tuple[int, int] | None:
    """Signs of ``Re c`` and ``tau * Im c`` for the fractional-power term, if the pole has one."""

    if pole.case != CASE_FRACTIONAL or pole.correction is None:
        return None
    c = pole.correction
    band = zero_band(c, rel=rel)
    return sign_with_band(c.real, band), sign_with_band(pole.tau * c.imag, band)


def _base_conditions(pole: PoleExpansion, rel: float) -> dict[str, Any]:
    band = zero_band(pole.mu, rel=rel)
    conditions: dict[str, Any] = {
        "re_mu": pole.mu.real,
        "im_mu": pole.mu.imag,
        "band": band,
        "case": pole.case,
    }
    if pole.correction is not None:
        conditions["re_correction"] = pole.correction.real
        conditions["im_correction"] = pole.correction.imag
    return conditions


def classify_bottom(pole: PoleExpansion, threshold: float = 1.0, rel: float = 1e-10) -> SpectralPrediction:
    """Decide a pole at the bottom of the essential spectrum from the sign of ``Re k``."""

    conditions = _base_conditions(pole, rel)
    re_sign = sign_with_band(pole.mu.real, conditions["band"])
    if re_sign > 0:
        kind, clause = "eigenvalue", "Re mu > 0"
    elif re_sign < 0:
        kind, clause = "resonance", "Re mu < 0"
    else:
        signs = _fractional_signs(pole, rel)
        if signs is None:
            kind, clause = "undetermined", "Re mu = 0 without a fractional-power term"
        elif signs[0] > 0:
            kind, clause = "eigenvalue", "Re mu = 0 and Re c > 0"
        elif signs[0] < 0:
            kind, clause = "resonance", "Re mu = 0 and Re c < 0"
        else:
            kind, clause = "undetermined", "Re mu = 0 and Re c = 0"
    LOGGER.debug(
        "Classified bottom pole", extra={"cluster": pole.cluster, "branch": pole.branch, "kind": kind}
    )
    return SpectralPrediction(
        kind=kind, pole=pole, threshold=threshold, justification=clause, conditions=conditions
    )


def classify_internal(
    pole: PoleExpansion,
    coupling: Optional[RadiatingCoefficients],
    threshold: float,
    rel: float = 1e-10,
) -> SpectralPrediction:
    """Decide a pole of branch ``tau`` at an internal threshold.

    Square integrability needs ``Re k > 0`` together with ``tau * Im k**2 < 0``; the conditions
    are tested on ``mu`` first and on the fractional-power term when ``mu`` sits on a boundary.
    """

    conditions = _base_conditions(pole, rel)
    band = conditions["band"]
    tau = pole.tau
    re_sign = sign_with_band(pole.mu.real, band)
    im_sign = sign_with_band(tau * pole.mu.imag, band)
    signs = _fractional_signs(pole, rel)
    c_re, c_im = signs if signs is not None else (0, 0)

    decays = re_sign > 0 or (re_sign == 0 and signs is not None and c_re > 0)
    outgoing_sign = im_sign < 0 or (im_sign == 0 and signs is not None and c_im < 0)
    conditions["decays"] = decays
    conditions["tau_im_negative"] = outgoing_sign

    if decays and outgoing_sign:
        clause = "Re mu > 0" if re_sign > 0 else "Re mu = 0 and Re c > 0"
        clause += " and tau*Im mu < 0" if im_sign < 0 else " and tau*Im mu = 0 and tau*Im c < 0"
        return _prediction("eigenvalue", pole, threshold, clause, conditions)

    if re_sign < 0 or (re_sign == 0 and signs is not None and c_re < 0):
        clause = "Re mu < 0" if re_sign < 0 else "Re mu = 0 and Re c < 0"
        return _prediction("resonance", pole, threshold, clause, conditions)

    if pole.q == 1 and decays:
        gamma_sign = 0
        if pole.gamma is not None:
            gamma_sign = sign_with_band(tau * pole.gamma.imag, zero_band(pole.gamma, rel=rel))
        growing = im_sign > 0 or (
            im_sign == 0 and not pole.q_identically_zero and pole.r == 0 and gamma_sign < 0
        )
        conditions["tau_im_positive"] = growing
        if growing:
            if coupling is None:
                conditions["coupling"] = "not computed"
            else:
                conditions["coupling_nonzero"] = coupling.any_nonzero
                if coupling.any_nonzero:
                    clause = "simple mu, Re k > 0, tau*Im k^2 > 0 and nonzero radiating coupling"
                    return _prediction("resonance", pole, threshold, clause, conditions)

    return _prediction("undetermined", pole, threshold, "no clause fired", conditions)


def _prediction(
    kind: str, pole: PoleExpansion, threshold: float, clause: str, conditions: dict[str, Any]
) -> SpectralPrediction:
    LOGGER.debug(
        "Classified internal pole",
        extra={"tau": pole.tau, "cluster": pole.cluster, "branch": pole.branch, "kind": kind},
    )
    return SpectralPrediction(
        kind=kind, pole=pole, threshold=threshold, justification=clause, conditions=conditions  # type: ignore[arg-type]
    )


def classify_poles(
    poles: Sequence[PoleExpansion],
    threshold: float,
    is_bottom: bool,
    couplings: Optional[Mapping[int, RadiatingCoefficients]] = None,
    rel: float = 1e-10,
) -> list[SpectralPrediction]:
    """Classify every pole of one branch; ``couplings`` is keyed by 1-based cluster index."""

    couplings = couplings or {}
    if is_bottom:
        return [classify_bottom(pole, threshold, rel) for pole in poles]
    return [classify_internal(pole, couplings.get(pole.cluster), threshold, rel) for pole in poles]


def _complex_pair(value: Optional[complex]) -> Optional[list[float]]:
    if value is None:
        return None
    return [float(value.real), float(value.imag)]


def prediction_record(prediction: SpectralPrediction) -> dict[str, Any]:
    """JSON-ready classification record of one pole."""

    pole = prediction.pole
    return {
        "tau": pole.tau,
        "cluster": pole.cluster,
        "branch": pole.branch,
        "mu": _complex_pair(pole.mu),
        "q": pole.q,
        "r": pole.r,
        "gamma": _complex_pair(pole.gamma),
        "q_identically_zero": pole.q_identically_zero,
        "case": pole.case,
        "remainder_order": str(pole.remainder_order),
        "kind": prediction.kind,
        "lambda_series_coeffs": [
            [str(exponent), float(coeff.real), float(coeff.imag)]
            for exponent, coeff in lambda_series_coefficients(pole, prediction.threshold)
        ],
        "justification_clause": prediction.justification,
        "conditions": {
            key: (value if isinstance(value, (bool, str)) else float(value))
            for key, value in prediction.conditions.items()
        },
    }


__all__ = ["classify_bottom", "classify_internal", "classify_poles", "prediction_record"]
