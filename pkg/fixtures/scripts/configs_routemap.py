"""Parse the RouteMap section: one entity per `route-map` block."""
import json
import sys


def main():
    lines = [l for l in sys.stdin.read().split("\n") if l.strip()]
    maps = []
    rm = None
    for line in lines:
        parts = line.split()
        if line.startswith("route-map "):
            rm = {"name": parts[1], "action": parts[2], "sequence": int(parts[3]),
                  "input_data": [line]}
            maps.append(rm)
            continue
        rm["input_data"].append(line)
        if parts[:2] == ["set", "local-preference"]:
            rm["local_preference"] = int(parts[2])
        elif parts[:4] == ["match", "ip", "address", "prefix-list"]:
            rm["match_prefix_list"] = parts[4]
    for rm in maps:
        rm["input_data"] = "\n".join(rm["input_data"])
    print(json.dumps(maps))


main()
