"""Monte Carlo lab for dynamically hedging CVA on European options."""

__version__ = "0.1.0"
