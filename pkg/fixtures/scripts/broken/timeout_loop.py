"""Broken variant of configs_device.py: reads stdin then spins forever.

Documented failure mode: sandbox timeout.
Corrected successor: scripts/configs_device.py.
"""
import sys


def main():
    sys.stdin.read()
    while True:
        pass


main()
