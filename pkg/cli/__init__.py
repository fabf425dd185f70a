from cli.commands import build_parser, main, parse_outcome

__all__ = ["build_parser", "main", "parse_outcome"]
