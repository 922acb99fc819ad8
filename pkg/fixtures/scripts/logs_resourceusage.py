"""Parse the ResourceUsage section: one entity per resource-tracker line."""
import json
import re
import sys

PATTERN = re.compile(
    r'^(\S+ \S+) \d+ INFO nova\.compute\.resource_tracker \[[^\]]*\] '
    r'Final resource view: name=(\S+) phys_ram=(\d+)MB used_ram=(\d+)MB')


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        m = PATTERN.match(line)
        if not m:
            continue
        entries.append({"timestamp": m.group(1), "host": m.group(2),
                        "physical_ram_mb": int(m.group(3)),
                        "used_ram_mb": int(m.group(4)), "input_data": line})
    print(json.dumps(entries))


main()
