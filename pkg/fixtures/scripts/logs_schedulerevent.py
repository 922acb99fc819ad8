"""Parse the SchedulerEvent section: one entity per scheduler line."""
import json
import re
import sys

PATTERN = re.compile(
    r"^(\S+ \S+) \d+ INFO nova\.scheduler\.host_manager \[[^\]]*\] "
    r"(.*host '([^']+)'.*)$")


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        m = PATTERN.match(line)
        if not m:
            continue
        entries.append({"timestamp": m.group(1), "message": m.group(2),
                        "host": m.group(3), "input_data": line})
    print(json.dumps(entries))


main()
