"""Parse the StaticRoute section: one entity per `ip route` line."""
import json
import sys


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        if not line.strip():
            continue
        parts = line.split()
        entries.append({"prefix": parts[2], "mask": parts[3],
                        "next_hop": parts[4], "input_data": line})
    print(json.dumps(entries))


main()
