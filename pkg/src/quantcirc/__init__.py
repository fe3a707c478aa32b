"""Lumped-element superconducting circuit quantization."""
