"""Parse the BgpProcess section: one process per `router bgp` block."""
import json
import sys


def main():
    lines = [l for l in sys.stdin.read().split("\n") if l.strip()]
    processes = []
    proc = None
    for line in lines:
        parts = line.split()
        if line.startswith("router bgp "):
            proc = {"asn": int(parts[2]), "neighbor": [], "input_data": [line]}
            processes.append(proc)
            continue
        proc["input_data"].append(line)
        if parts[:2] == ["bgp", "router-id"]:
            proc["router_id"] = parts[2]
        elif parts[0] == "neighbor" and "remote-as" in parts:
            proc["neighbor"].append({"address": parts[1],
                                     "remote_as": int(parts[3])})
    for proc in processes:
        proc["input_data"] = "\n".join(proc["input_data"])
    print(json.dumps(processes))


main()
