"""Single-source boundary integral equations for dielectric scattering."""

__version__ = "0.1.0"
