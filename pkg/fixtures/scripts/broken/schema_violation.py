"""Broken variant of configs_device.py: exits cleanly but emits JSON that
violates the Device section schema (hostname has the wrong type and the
required input_data property is missing).

Documented failure mode: schema validation error.
Corrected successor: scripts/configs_device.py.
"""
import json
import sys


def main():
    sys.stdin.read()
    print(json.dumps([{"hostname": 42}]))


main()
