#!/usr/bin/env python3
"""Entry point for choice-gibbs."""

from src.app import main

if __name__ == "__main__":
    main()
