"""Pansharpening pipeline sources; modules are imported top-level with src/ on the path."""
