"""Exact counts and analytic bounds for binary cyclotomic polynomials."""

from .analytic import DyadicBox, Gamma, ScaleContext, c_gamma, gamma_zero, h_exponent, kappa_zero, rho
from .arith import PrimeTable, mod_inverse, sieve_primes
from .counting import CountRecord, h_gamma_count, h_gamma_predicted
from .cyclotomic import cyclotomic_coeffs, theta_carlitz, theta_direct
from .errors import BCPError, CapacityError, DomainError, PreconditionError, VerificationError

__all__ = [
    "BCPError", "CapacityError", "CountRecord", "DomainError", "DyadicBox", "Gamma",
    "PreconditionError", "PrimeTable", "ScaleContext", "VerificationError", "c_gamma",
    "cyclotomic_coeffs", "gamma_zero", "h_exponent", "h_gamma_count", "h_gamma_predicted",
    "kappa_zero", "mod_inverse", "rho", "sieve_primes", "theta_carlitz", "theta_direct",
]
