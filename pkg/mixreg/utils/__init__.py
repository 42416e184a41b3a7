"""MixReg utilities."""
