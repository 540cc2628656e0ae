#!/usr/bin/env python3
"""python -m spinor_lfunc"""

from .cli import main

if __name__ == '__main__':
    main()
