"""Orchestration: declarative config, staged runs, bundle export, reports."""

from bibatlas.pipeline.config import ConfigError, PipelineConfig, load_config

__all__ = ["ConfigError", "PipelineConfig", "load_config"]
