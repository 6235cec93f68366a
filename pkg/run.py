#!/usr/bin/env python3
"""
Simple script to run the WDRA toolkit.
"""
import sys

from app.main import main

if __name__ == "__main__":
    sys.exit(main())
