"""Broken variant of configs_device.py: fails to compile.

Documented failure mode: nonzero exit with "SyntaxError" on stderr.
Corrected successor: scripts/configs_device.py.
"""
import json
import sys


def main(:
    print(json.dumps([]))


main()
