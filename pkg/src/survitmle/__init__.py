"""survitmle: targeted learning for treatment-effect curves from LTRC survival data."""

__version__ = "0.1.0"
