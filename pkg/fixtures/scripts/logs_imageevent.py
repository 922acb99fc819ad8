"""Parse the ImageEvent section: one entity per image-service line."""
import json
import re
import sys

PATTERN = re.compile(
    r'^(\S+ \S+) \d+ INFO nova\.image\.glance \[[^\]]*\] '
    r'Image (\S+) status changed to (\w+)$')


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        m = PATTERN.match(line)
        if not m:
            continue
        entries.append({"timestamp": m.group(1), "image_id": m.group(2),
                        "status": m.group(3), "input_data": line})
    print(json.dumps(entries))


main()
