"""Covariant star products on quantum spaces from Drinfeld twists of U_h(su2)."""
from .hseries import HSeries, exp_h, qbinom_qm2, qfact, qnum, session
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["HSeries", "exp_h", "qnum", "qfact", "qbinom_qm2", "session", "BACKEND"]
