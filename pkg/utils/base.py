"""
Base classes for SpinMate experiment tools.

This module provides the abstract base class and result format
for every experiment the command line can run.
"""

from abc import ABC, abstractmethod
from typing import Any, Optional
from dataclasses import dataclass

from spin.errors import SpinValidationError


ERROR_VALIDATION = "validation"
ERROR_INTERNAL = "internal"


@dataclass
class ToolResult:
    """Standard result format for all tools."""
    success: bool
    data: Any
    error: Optional[str] = None
    metadata: Optional[dict] = None

    @property
    def error_type(self) -> Optional[str]:
        if self.success:
            return None
        return (self.metadata or {}).get("error_type", ERROR_INTERNAL)


class BaseTool(ABC):
    """Abstract base class for all experiment tools."""

    def __init__(self, config):
        self.config = config

    @abstractmethod
    def execute(self, **kwargs) -> Any:
        """Compute the tool's payload; may raise."""
        pass

    def run(self, **kwargs) -> ToolResult:
        """Execute the tool, folding any exception into a failed ToolResult."""
        try:
            return ToolResult(success=True, data=self.execute(**kwargs))
        except SpinValidationError as e:
            return ToolResult(
                success=False,
                data=None,
                error=str(e),
                metadata={"error_type": ERROR_VALIDATION}
            )
        except Exception as e:
            return ToolResult(
                success=False,
                data=None,
                error=f"{type(e).__name__}: {e}",
                metadata={"error_type": ERROR_INTERNAL}
            )
