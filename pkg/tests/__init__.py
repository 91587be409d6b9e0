"""Test suite for the pansharpening pipeline."""
