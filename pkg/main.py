#!/usr/bin/env python3
"""Main entry point for ietjoinings."""

from cli import main

if __name__ == "__main__":
    main()
