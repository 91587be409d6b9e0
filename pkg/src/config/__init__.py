"""Process settings, logging setup and run configuration."""
