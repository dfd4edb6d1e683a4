"""
Base exporter interface
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional


class ArtifactExporter(ABC):
    """
    Base class for artifact exporters

    Exporters ship files produced by the toolkit (datasets, model files,
    LP files, benchmark CSVs) to an archive location.
    """

    @abstractmethod
    def export(self, artifact_path: str, metadata: Optional[Dict[str, Any]] = None) -> str:
        """
        Export an artifact

        Args:
            artifact_path: Path to the local file
            metadata: Optional metadata (command, seed, model kind...)

        Returns:
            str: URL or path of the exported copy

        Raises:
            ExportError: If export fails
        """
        raise NotImplementedError("Subclasses must implement export() method")

    def validate_config(self) -> bool:
        return True

    def __str__(self):
        return f"{self.__class__.__name__}()"
