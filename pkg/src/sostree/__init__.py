"""Periodic boundary laws of the generalized SOS model on Cayley trees."""
from ._core import BACKEND
from .model import ModelParams, alpha_weight, tau_from_theta, theta_from_tau, transfer_q

__all__ = [
    "BACKEND",
    "ModelParams",
    "alpha_weight",
    "tau_from_theta",
    "theta_from_tau",
    "transfer_q",
]
