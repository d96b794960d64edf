from .matrix_io.reports import TOOL_VERSION as __version__
