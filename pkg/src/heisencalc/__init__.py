"""Group calculus, Hessian certification, and oscillatory-operator experiments."""

__version__ = "0.1.0"
