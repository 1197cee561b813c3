"""formalcurves - exact computer algebra for framed formal curves."""

__version__ = "0.1.0"
__app_name__ = "formalcurves"
