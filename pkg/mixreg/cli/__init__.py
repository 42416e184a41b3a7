"""MixReg command line interface."""
