"""Parse the LoggingHost section: one entity per `logging host` line."""
import json
import sys


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        if not line.strip():
            continue
        entries.append({"host": line.split()[2], "input_data": line})
    print(json.dumps(entries))


main()
