#!/usr/bin/env python3
"""Launcher for the hyper-binom command-line interface.

Runs the same entry point as the installed ``hyper-binom`` console script from a source
checkout.

Example:
    $ python hyper-binom.py verify --id S8 --n 0..20
    $ python hyper-binom.py eval --pfq "2F1(-2,-2;1;1)"
"""

from __future__ import annotations

from hyperbinom.cli import cmd_verify, configure_logging, main, parse_args

__all__ = ["cmd_verify", "configure_logging", "main", "parse_args"]


if __name__ == "__main__":  # pragma: no cover - CLI entry point
    main()
