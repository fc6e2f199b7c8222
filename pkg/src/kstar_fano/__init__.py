"""K*-surfaces over the projective plane: Gorenstein Fano threefolds of Picard number one."""

__version__ = "0.1.0"
