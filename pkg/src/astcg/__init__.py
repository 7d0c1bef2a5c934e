"""AST-based, application-only static call-graph generation on tree-sitter trees."""

__version__ = "0.1.0"
