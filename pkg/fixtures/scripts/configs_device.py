"""Parse the Device section: hostname, version, and interface blocks."""
import json
import sys


def main():
    lines = [l for l in sys.stdin.read().split("\n") if l.strip()]
    devices = []
    device = None
    iface = None
    for line in lines:
        if line.startswith("hostname "):
            device = {"hostname": line.split()[1], "interface": [],
                      "input_data": [line]}
            devices.append(device)
            iface = None
            continue
        device["input_data"].append(line)
        parts = line.split()
        if line.startswith("version "):
            device["os_version"] = parts[1]
        elif line.startswith("interface "):
            iface = {"name": parts[1]}
            device["interface"].append(iface)
        elif line.startswith(" description "):
            iface["description"] = line.strip()[len("description "):]
        elif line.startswith(" ip address "):
            iface["ip_address"] = parts[2]
            iface["subnet_mask"] = parts[3]
    for device in devices:
        device["input_data"] = "\n".join(device["input_data"])
    print(json.dumps(devices))


main()
