from .base import BaseTool, ToolResult
from .tool_config import ToolConfig

__all__ = [
    # Base
    "BaseTool",
    "ToolResult",

    # Config
    "ToolConfig",
]
