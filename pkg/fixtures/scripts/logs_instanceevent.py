"""Parse the InstanceEvent section: one entity per compute-manager line."""
import json
import re
import sys

PATTERN = re.compile(
    r'^(\S+ \S+) \d+ INFO nova\.compute\.manager \[[^\]]*\] '
    r'\[instance: ([^\]]+)\] (.+)$')


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        m = PATTERN.match(line)
        if not m:
            continue
        entries.append({"timestamp": m.group(1), "instance_id": m.group(2),
                        "event": m.group(3), "input_data": line})
    print(json.dumps(entries))


main()
