"""Parse the NtpServer section: one entity per `ntp server` line."""
import json
import sys


def main():
    entries = []
    for line in sys.stdin.read().split("\n"):
        if not line.strip():
            continue
        entries.append({"server": line.split()[2], "input_data": line})
    print(json.dumps(entries))


main()
