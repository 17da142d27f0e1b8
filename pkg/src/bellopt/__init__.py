"""Rate-based Bell inequalities for four-mode quantum optical fields."""

__version__ = "0.1.0"

from bellopt.kernels import BACKEND  # noqa: E402

__all__ = ["BACKEND", "__version__"]
