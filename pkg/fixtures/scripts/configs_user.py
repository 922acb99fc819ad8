"""Parse the User section: one entity per `username` line."""
import json
import sys


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        if not line.strip():
            continue
        parts = line.split()
        entries.append({"name": parts[1], "privilege": int(parts[3]),
                        "input_data": line})
    print(json.dumps(entries))


main()
