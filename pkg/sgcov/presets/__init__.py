"""Built-in run presets, loaded with ``preset:<name>``."""
