"""
Local archive directory exporter
"""
import json
import logging
import os
import shutil
from typing import Any, Dict, Optional

from .base import ArtifactExporter
from ..exceptions import ExportError


class LocalFileExporter(ArtifactExporter):
    """
    Copy artifacts into an archive directory

    Metadata, when given, is written next to the copy as `<name>.meta.json`.

    Example:
        exporter = LocalFileExporter('runs/2021-09-06')
        destination = exporter.export('bench.csv', {'seed': 7})
    """

    def __init__(self, destination_dir: str, create_dir: bool = True,
                 logger: Optional[logging.Logger] = None):
        self.destination_dir = destination_dir
        self.create_dir = create_dir
        self.logger = logger or logging.getLogger(__name__)

    def export(self, artifact_path: str, metadata: Optional[Dict[str, Any]] = None) -> str:
        try:
            if self.create_dir:
                os.makedirs(self.destination_dir, exist_ok=True)
            if not os.path.isdir(self.destination_dir):
                raise ExportError(f"Destination directory does not exist: {self.destination_dir}")

            filename = os.path.basename(artifact_path)
            destination_path = os.path.join(self.destination_dir, filename)
            shutil.copy2(artifact_path, destination_path)
            if metadata:
                with open(destination_path + '.meta.json', 'w', encoding='utf-8') as handle:
                    json.dump({k: str(v) for k, v in metadata.items()}, handle, indent=2,
                              sort_keys=True)
            self.logger.info(f"Archived {artifact_path} -> {destination_path}")
            return destination_path

        except ExportError:
            raise
        except Exception as e:
            raise ExportError(f"Failed to archive {artifact_path}: {e}")

    def validate_config(self) -> bool:
        """Check that the archive directory (or its parent) is writable"""
        if os.path.exists(self.destination_dir):
            return os.access(self.destination_dir, os.W_OK)
        parent = os.path.dirname(os.path.abspath(self.destination_dir))
        return os.access(parent, os.W_OK) if os.path.exists(parent) else False

    def __str__(self):
        return f"LocalFileExporter(destination={self.destination_dir})"
