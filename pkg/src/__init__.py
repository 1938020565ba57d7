"""limabean: rescaled matrix random walks, their Brown measures and the k -> infinity limit."""

from src.logging_config import configure_default_logging

configure_default_logging()
