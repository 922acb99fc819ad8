"""Assign each compute-service log line to its level-1 section.

Reads log text on stdin, prints {"<line number>": "<section>"} on stdout.
ERROR lines and their TRACE continuations belong to ErrorEvent.
"""
import json
import sys


def classify(line):
    if " ERROR " in line or " TRACE " in line:
        return "ErrorEvent"
    if "nova.osapi_compute.wsgi.server" in line:
        return "ApiRequest"
    if "nova.metadata.wsgi.server" in line:
        return "MetadataRequest"
    if "nova.compute.resource_tracker" in line:
        return "ResourceUsage"
    if "nova.compute.manager" in line:
        return "InstanceEvent"
    if "nova.scheduler" in line:
        return "SchedulerEvent"
    if "nova.image.glance" in line:
        return "ImageEvent"
    return "_unassigned"


def main():
    lines = sys.stdin.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    result = {str(i): classify(line) for i, line in enumerate(lines, start=1)}
    print(json.dumps(result))


main()
