"""Parse the ErrorEvent section: one entity per ERROR line.

TRACE continuation lines carry no structured fields and are skipped.
"""
import json
import re
import sys

PATTERN = re.compile(r'^(\S+ \S+) \d+ ERROR (\S+) \[[^\]]*\] (.+)$')


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        m = PATTERN.match(line)
        if not m:
            continue
        entries.append({"timestamp": m.group(1), "component": m.group(2),
                        "message": m.group(3), "input_data": line})
    print(json.dumps(entries))


main()
