"""Parse the AccessList section: one entity per `access-list` line."""
import json
import sys


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        if not line.strip():
            continue
        parts = line.split()
        entries.append({"number": int(parts[1]), "action": parts[2],
                        "protocol": parts[3],
                        "source": " ".join(parts[4:-1]),
                        "destination": parts[-1],
                        "input_data": line})
    print(json.dumps(entries))


main()
