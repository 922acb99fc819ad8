"""Parse the PrefixList section: one entity per `ip prefix-list` line."""
import json
import sys


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        if not line.strip():
            continue
        parts = line.split()
        entries.append({"name": parts[2], "sequence": int(parts[4]),
                        "action": parts[5], "prefix": parts[6],
                        "input_data": line})
    print(json.dumps(entries))


main()
