"""Three-variable superintuitionistic calculus construction and its desk-scale checks."""
__version__ = "0.1.0"
