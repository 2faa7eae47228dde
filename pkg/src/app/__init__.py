"""Experiment layer: configuration, problem registry, runner, exporters and CLI."""
