"""Assign each router-config line to its level-1 section.

Reads config text on stdin, prints {"<line number>": "<section>"} on stdout.
Indented lines belong to the section of the preceding top-level line.
"""
import json
import sys

TOP_LEVEL = [
    ("hostname ", "Device"),
    ("version ", "Device"),
    ("interface ", "Device"),
    ("username ", "User"),
    ("router bgp ", "BgpProcess"),
    ("route-map ", "RouteMap"),
    ("ip prefix-list ", "PrefixList"),
    ("access-list ", "AccessList"),
    ("ip route ", "StaticRoute"),
    ("ntp server ", "NtpServer"),
    ("logging host ", "LoggingHost"),
]


def classify(line, current):
    if line.startswith((" ", "\t")):
        return current or "_unassigned"
    for prefix, section in TOP_LEVEL:
        if line.startswith(prefix):
            return section
    return "_unassigned"


def main():
    lines = sys.stdin.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    result = {}
    current = None
    for number, line in enumerate(lines, start=1):
        current = classify(line, current)
        result[str(number)] = current
    print(json.dumps(result))


main()
