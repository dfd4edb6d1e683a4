"""
Exporters for run artifacts
"""
from .base import ArtifactExporter
from .file_exporter import LocalFileExporter
from .s3_exporter import S3Exporter

__all__ = ['ArtifactExporter', 'LocalFileExporter', 'S3Exporter']
