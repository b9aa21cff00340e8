"""Base exporter interface."""

import os
import tempfile
from abc import ABC, abstractmethod

from ..models import ExportResult


class ExportError(Exception):
    """Base exception for export errors."""
    pass


class UnknownFormatError(ExportError):
    """Raised when a table format is not md, tex or csv."""
    pass


class UnknownCoefficientError(ExportError):
    """Raised when a selection names a coefficient that does not exist."""
    pass


def atomic_write_text(path: str, text: str) -> None:
    """Write text to a temp file in the target directory, then rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.splitext(path)[1])
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


class BaseExporter(ABC):
    """导出器基类"""

    @abstractmethod
    def render(self, payload) -> str:
        """渲染为文本"""
        pass

    @abstractmethod
    def count(self, payload) -> int:
        """Number of records the payload exports."""
        pass

    def export(self, payload, output_path: str) -> ExportResult:
        """渲染并原子写入文件

        Args:
            payload: object the concrete exporter renders
            output_path: target file path

        Returns:
            ExportResult with success status and file path
        """
        try:
            text = self.render(payload)
            atomic_write_text(output_path, text)
            n = self.count(payload)
            return ExportResult(
                success=True,
                message=f"exported {n} records to {output_path}",
                exported_count=n,
                file_path=output_path,
            )
        except ExportError:
            raise
        except (OSError, ValueError) as e:
            return ExportResult(
                success=False,
                message=f"export to {output_path} failed: {e}",
                exported_count=0,
                file_path=None,
            )
