"""Parse the MetadataRequest section: one entity per metadata WSGI line."""
import json
import re
import sys

PATTERN = re.compile(
    r'^(\S+ \S+) \d+ INFO nova\.metadata\.wsgi\.server \[[^\]]*\] '
    r'(\S+) "(\S+) (\S+) HTTP/1\.1" status: (\d+) len: (\d+) time: ([\d.]+)$')


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        m = PATTERN.match(line)
        if not m:
            continue
        entries.append({
            "timestamp": m.group(1), "client_ip": m.group(2),
            "method": m.group(3), "url": m.group(4),
            "status_code": int(m.group(5)), "response_length": int(m.group(6)),
            "response_time": float(m.group(7)), "input_data": line,
        })
    print(json.dumps(entries))


main()
