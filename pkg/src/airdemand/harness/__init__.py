"""Experiment orchestration: config, grid runs, reports, plots and the CLI."""
