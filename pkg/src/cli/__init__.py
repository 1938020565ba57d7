"""
CLI Module.

Provides the limabean console script (see src.cli.main).
"""
