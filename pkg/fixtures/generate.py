#!/usr/bin/env python3
"""Regenerate the derived fixture assets.

Writes the synthetic 500-line compute-service log corpus and the scripted
LLM prompt-response fixtures for both bundled corpora. Everything here is
deterministic; run it from anywhere:

    python3 fixtures/generate.py
"""
import json
import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parent

REFINE_COPIES = 10  # generous ceiling on refine rounds per learning loop

SECTIONS = {
    "configs": {
        "AccessList": "configs_accesslist.py",
        "BgpProcess": "configs_bgpprocess.py",
        "Device": "configs_device.py",
        "LoggingHost": "configs_logginghost.py",
        "NtpServer": "configs_ntpserver.py",
        "PrefixList": "configs_prefixlist.py",
        "RouteMap": "configs_routemap.py",
        "StaticRoute": "configs_staticroute.py",
        "User": "configs_user.py",
    },
    "logs": {
        "ApiRequest": "logs_apirequest.py",
        "ErrorEvent": "logs_errorevent.py",
        "ImageEvent": "logs_imageevent.py",
        "InstanceEvent": "logs_instanceevent.py",
        "MetadataRequest": "logs_metadatarequest.py",
        "ResourceUsage": "logs_resourceusage.py",
        "SchedulerEvent": "logs_schedulerevent.py",
    },
}

SPLITTERS = {"configs": "configs_splitter.py", "logs": "logs_splitter.py"}


# ---------------------------------------------------------------- log corpus

LOG_PID = 25746
API_URLS = [
    "/v2/54fadb412c4e40cdbaed9335e4c35a9e/servers/detail",
    "/v2/54fadb412c4e40cdbaed9335e4c35a9e/servers",
    "/v2/54fadb412c4e40cdbaed9335e4c35a9e/os-services",
    "/v2/54fadb412c4e40cdbaed9335e4c35a9e/flavors/detail",
]
META_URLS = [
    "/openstack/2013-10-17/meta_data.json",
    "/latest/meta-data/",
    "/openstack/2012-08-10/meta_data.json",
]
INSTANCE_EVENTS = [
    "VM Started (Lifecycle Event)",
    "VM Paused (Lifecycle Event)",
    "VM Resumed (Lifecycle Event)",
    "VM Stopped (Lifecycle Event)",
    "Took 8.55 seconds to spawn the instance on the hypervisor.",
    "Terminating instance",
]
IMAGE_IDS = [
    "0673dd71-34c5-4fbb-86c4-40623fbe45b4",
    "9f1b2c3d-4e5f-6789-abcd-ef0123456789",
    "77aa88bb-ccdd-eeff-0011-223344556677",
]


def _timestamp(i):
    total_ms = i * 1337
    s, ms = divmod(total_ms, 1000)
    h, rem = divmod(s, 3600)
    m, sec = divmod(rem, 60)
    return f"2017-05-16 {h:02d}:{m:02d}:{sec:02d}.{ms:03d}"


def _req_id(i):
    return f"req-{i:08x}-9843-4d51-a8d1-{i:012x}"


def _prefix(i, level, component):
    return f"{_timestamp(i)} {LOG_PID} {level} {component} [{_req_id(i)}]"


def _api_line(i, k):
    ip = ["10.11.10.1", "10.11.10.9", "10.11.21.112", "10.11.21.143"][k % 4]
    method = ["GET", "GET", "GET", "POST", "GET", "DELETE"][k % 6]
    if method == "GET":
        url = API_URLS[k % 4]
        status = 404 if k % 17 == 0 else 200
    elif method == "POST":
        url = "/v2/54fadb412c4e40cdbaed9335e4c35a9e/servers"
        status = 202
    else:
        url = "/v2/54fadb412c4e40cdbaed9335e4c35a9e/servers/3edec1e4"
        status = 204
    length = 1583 + (k * 37) % 211
    rtime = 0.1 + (k % 13) * 0.0173
    return (f"{_prefix(i, 'INFO', 'nova.osapi_compute.wsgi.server')} {ip} "
            f'"{method} {url} HTTP/1.1" status: {status} len: {length} '
            f"time: {rtime:.7f}")


def _meta_line(i, k):
    ip = ["10.11.21.139", "10.11.21.140"][k % 2]
    url = META_URLS[k % 3]
    length = 1574 + (k * 13) % 89
    rtime = 0.15 + (k % 11) * 0.0191
    return (f"{_prefix(i, 'INFO', 'nova.metadata.wsgi.server')} {ip} "
            f'"GET {url} HTTP/1.1" status: 200 len: {length} '
            f"time: {rtime:.7f}")


def _instance_line(i, k):
    iid = f"af9d460c-89bf-4d5e-9e01-{k % 5:012d}"
    return (f"{_prefix(i, 'INFO', 'nova.compute.manager')} "
            f"[instance: {iid}] {INSTANCE_EVENTS[k % 6]}")


def _resource_line(i, k):
    used = 2048 + 256 * (k % 4)
    return (f"{_prefix(i, 'INFO', 'nova.compute.resource_tracker')} "
            f"Final resource view: name=cp-{k % 3 + 1} phys_ram=64172MB "
            f"used_ram={used}MB phys_disk=15GB used_disk=20GB")


def _scheduler_line(i, k):
    return (f"{_prefix(i, 'INFO', 'nova.scheduler.host_manager')} "
            f"Successfully synced instances from host 'cp-{k % 3 + 1}'.")


def _image_line(i, k):
    status = ["queued", "saving", "active"][(k // 3) % 3]
    return (f"{_prefix(i, 'INFO', 'nova.image.glance')} "
            f"Image {IMAGE_IDS[k % 3]} status changed to {status}")


LINE_MAKERS = {
    "api": _api_line,
    "meta": _meta_line,
    "inst": _instance_line,
    "res": _resource_line,
    "sched": _scheduler_line,
    "img": _image_line,
}

CYCLE_WEIGHTS = {"api": 22, "meta": 8, "inst": 8, "res": 5, "sched": 3, "img": 3}


def _schedule(weights):
    """Deterministic error-diffusion interleave of the weighted tags."""
    total = sum(weights.values())
    acc = dict.fromkeys(weights, 0.0)
    out = []
    for _ in range(total):
        for tag in weights:
            acc[tag] += weights[tag] / total
        pick = max(sorted(weights), key=lambda t: acc[t])
        acc[pick] -= 1.0
        out.append(pick)
    return out


def _error_block():
    """4 ERROR lines, one with 6 TRACE continuation lines."""
    iid = "af9d460c-89bf-4d5e-9e01-000000000001"
    mgr = "nova.compute.manager"
    src = "/usr/lib/python2.7/site-packages/nova/compute/manager.py"

    def err(i, message):
        return f"{_prefix(i, 'ERROR', mgr)} {message}"

    def trace(i, content):
        return f"{_timestamp(i)} {LOG_PID} TRACE {mgr} {content}"

    return [
        lambda i: err(i, f"[instance: {iid}] Instance failed to spawn: "
                         "timeout waiting for device"),
        lambda i: trace(i, "Traceback (most recent call last):"),
        lambda i: trace(i, f'  File "{src}", line 2108, in _build_resources'),
        lambda i: trace(i, "    yield resources"),
        lambda i: trace(i, f'  File "{src}", line 1950, in _build_instance'),
        lambda i: trace(i, "    block_device_info=block_device_info)"),
        lambda i: trace(i, "TimeoutError: timeout waiting for device"),
        lambda i: err(i, f"[instance: {iid}] Failed to allocate network "
                         "for instance"),
        lambda i: err(i, "Live migration failed: destination host unreachable"),
        lambda i: err(i, "Unexpected error while running command: qemu-img info"),
    ]


def generate_log_corpus():
    tags = _schedule(CYCLE_WEIGHTS) * 10  # 490 regular lines
    counters = dict.fromkeys(LINE_MAKERS, 0)
    lines = []
    error_makers = _error_block()
    for i in range(500):
        if 300 <= i < 310:
            lines.append(error_makers[i - 300](i))
            continue
        tag = tags[i if i < 300 else i - 10]
        k = counters[tag]
        counters[tag] += 1
        lines.append(LINE_MAKERS[tag](i, k))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- QA fixtures

# per question: (graph query, text query, hybrid query, synthesized answer)
QA_FIXTURES = {
    "logs": [
        ('MATCH (a:ApiRequest) RETURN a.url LIMIT 5',
         'nova OR api',
         'MATCH (a:ApiRequest) RETURN a.method, a.url LIMIT 5',
         'The data holds compute API requests, metadata requests, instance '
         'lifecycle events, resource usage, scheduler events, image events, '
         'and error events.'),
        ('MATCH (e:InstanceEvent) RETURN e.event LIMIT 5',
         'compute manager',
         'MATCH (e:InstanceEvent) RETURN e.event LIMIT 5',
         'The compute log records instance lifecycle events such as VM '
         'Started and VM Paused.'),
        ('MATCH (a:ApiRequest) RETURN a.method, a.url, a.status_code LIMIT 5',
         'osapi OR wsgi',
         'MATCH (a:ApiRequest) RETURN a.method, a.url, a.status_code LIMIT 5',
         'API entries log the HTTP method, URL, status code, response length, '
         'and response time of each request.'),
        ('MATCH (a:ApiRequest) RETURN a.method LIMIT 20',
         'get OR post',
         'MATCH (a:ApiRequest) WHERE a.method = "GET" RETURN a.timestamp LIMIT 10',
         'GET is by far the most common method, followed by POST and DELETE.'),
        ('MATCH (a:ApiRequest) RETURN a.client_ip LIMIT 10',
         '10 11',
         'MATCH (m:MetadataRequest) RETURN m.client_ip LIMIT 10',
         'Clients use private 10.11.x.x addresses.'),
        ('MATCH (m:MetadataRequest) RETURN m.url LIMIT 10',
         'meta OR metadata',
         'MATCH (m:MetadataRequest) RETURN m.method, m.url LIMIT 10',
         'The logs show GET requests to meta_data.json and meta-data paths.'),
        ('MATCH (e:InstanceEvent) WHERE e.event CONTAINS "VM" RETURN e.event LIMIT 10',
         '"Lifecycle Event"',
         'MATCH (e:InstanceEvent) WHERE e.event CONTAINS "Lifecycle" '
         'RETURN e.timestamp, e.event LIMIT 10',
         'Yes: VM Started, Paused, Resumed, and Stopped lifecycle events '
         'appear throughout.'),
        ('MATCH (a:ApiRequest) RETURN a.response_time LIMIT 10',
         'status time',
         'MATCH (a:ApiRequest) RETURN a.response_time LIMIT 10',
         'Response times typically fall between 0.1 and 0.3 seconds.'),
        ('MATCH (a:ApiRequest) WHERE a.status_code = 404 RETURN a.url LIMIT 10',
         'error OR 404',
         'MATCH (a:ApiRequest) WHERE a.status_code = 404 RETURN a.url LIMIT 10',
         'Yes, a handful of requests return status 404.'),
        ('MATCH (a:ApiRequest) RETURN a.url LIMIT 20',
         'serve*',
         'MATCH (a:ApiRequest) RETURN a.url LIMIT 20',
         'GET requests to the servers and servers/detail endpoints recur '
         'constantly.'),
        ('MATCH (i:ImageEvent) WHERE i.image_id CONTAINS "0673dd71" '
         'RETURN i.status, i.timestamp',
         '0673dd71',
         'MATCH (i:ImageEvent) WHERE i.image_id CONTAINS "0673dd71" '
         'RETURN i.status, i.timestamp',
         'The image cycles through queued, saving, and active states.'),
        ('MATCH (m:MetadataRequest) WHERE m.url CONTAINS "meta_data" '
         'RETURN m.response_time LIMIT 5',
         '"meta_data.json"',
         'MATCH (m:MetadataRequest) WHERE m.url CONTAINS "meta_data" '
         'RETURN m.response_time LIMIT 5',
         'The latest matching GET took roughly 0.2 seconds.'),
        ('MATCH (e:InstanceEvent) WHERE e.instance_id CONTAINS "af9d460c" '
         'RETURN e.event LIMIT 10',
         'af9d460c',
         'MATCH (e:InstanceEvent) WHERE e.instance_id CONTAINS "af9d460c" '
         'RETURN e.event LIMIT 10',
         'Lifecycle events (Started, Paused, Resumed, Stopped) plus spawn '
         'timing were logged for that instance.'),
        ('MATCH (a:ApiRequest) WHERE a.method = "GET" AND a.url CONTAINS '
         '"servers/detail" RETURN a.timestamp',
         '"servers/detail"',
         'MATCH (a:ApiRequest) WHERE a.method = "GET" AND a.url CONTAINS '
         '"servers/detail" RETURN a.timestamp',
         'See the returned rows; each row is one matching GET request.'),
        ('MATCH (m:MetadataRequest) RETURN m.client_ip LIMIT 10',
         'metadata server',
         'MATCH (m:MetadataRequest) RETURN m.client_ip LIMIT 10',
         'Metadata requests involve 10.11.21.139 and 10.11.21.140.'),
        ('MATCH (m:MetadataRequest) WHERE m.url = '
         '"/openstack/2013-10-17/meta_data.json" RETURN m.response_length LIMIT 5',
         '"2013-10-17"',
         'MATCH (m:MetadataRequest) WHERE m.url = '
         '"/openstack/2013-10-17/meta_data.json" RETURN m.response_length LIMIT 5',
         'The response length was about 1574 bytes.'),
    ],
    "configs": [
        ('MATCH (d:Device) RETURN d.hostname',
         'zzznosuchtoken',
         'MATCH (d:Device) RETURN d.hostname',
         'There are 5 devices: as1border1, as1core1, as2border1, as2core1, '
         'and as3border1.'),
        ('MATCH (d:Device)-[HAS_CHILD]->(i:interface) WHERE d.hostname = '
         '"as1border1" RETURN i.name',
         'as1border1',
         'MATCH (d:Device)-[HAS_CHILD]->(i:interface) WHERE d.hostname = '
         '"as1border1" RETURN i.name',
         'as1border1 has GigabitEthernet0/0, GigabitEthernet1/0, and '
         'Loopback0.'),
        ('MATCH (d:Device)-[HAS_CHILD]->(i:interface) WHERE d.hostname = '
         '"as1border1" AND i.name = "GigabitEthernet0/0" RETURN i.ip_address',
         '"GigabitEthernet0/0"',
         'MATCH (d:Device)-[HAS_CHILD]->(i:interface) WHERE d.hostname = '
         '"as1border1" AND i.name = "GigabitEthernet0/0" RETURN i.ip_address',
         'The IP address is 10.12.11.1.'),
        ('MATCH (r:RouteMap) RETURN r.name, r.local_preference',
         '"local-preference"',
         'MATCH (r:RouteMap) RETURN r.name, r.local_preference',
         'Local preference values range from 100 to 350; 100 is the most '
         'common.'),
        ('MATCH (r:RouteMap) WHERE r.name = "as2_to_as1" '
         'RETURN r.local_preference',
         'as2_to_as1',
         'MATCH (r:RouteMap) WHERE r.name = "as2_to_as1" '
         'RETURN r.local_preference',
         'Route-map as2_to_as1 sets local-preference 350.'),
        ('MATCH (a:AccessList) WHERE a.source CONTAINS "1.0.2.0" '
         'RETURN a.number',
         '"host 1.0.2.0"',
         'MATCH (a:AccessList) WHERE a.source CONTAINS "1.0.2.0" '
         'RETURN a.number',
         'access-list 102 permits IP traffic for host 1.0.2.0.'),
        ('MATCH (r:RouteMap) WHERE r.name = "as2_to_as3" '
         'RETURN r.match_prefix_list',
         'as2_to_as3',
         'MATCH (r:RouteMap) WHERE r.name = "as2_to_as3" '
         'RETURN r.match_prefix_list',
         'Route-map as2_to_as3 matches prefix-list pl_as3.'),
        ('MATCH (p:PrefixList) RETURN p.name, p.prefix',
         'prefix-list',
         'MATCH (p:PrefixList) RETURN p.name, p.prefix',
         'Configured prefix-lists: pl_as1, pl_as2, pl_as3, pl_core, '
         'pl_core2.'),
    ],
}

STRATEGY_ORDER = ["graph", "text", "combined", "hybrid"]


def write_prompt_fixtures(corpus):
    out_dir = ROOT / "prompts" / corpus
    if out_dir.exists():
        shutil.rmtree(out_dir)
    out_dir.mkdir(parents=True)

    schema_text = (ROOT / "schemas" / f"{corpus}.json").read_text(encoding="utf-8")
    (out_dir / "schema_init-1.txt").write_text(schema_text, encoding="utf-8")
    for n in range(1, REFINE_COPIES + 1):
        (out_dir / f"schema_refine-{n}.txt").write_text(schema_text, encoding="utf-8")

    splitter = (ROOT / "scripts" / SPLITTERS[corpus]).read_text(encoding="utf-8")
    (out_dir / "script_init-1.txt").write_text(splitter, encoding="utf-8")
    for n in range(1, REFINE_COPIES + 1):
        (out_dir / f"script_refine-{n}.txt").write_text(splitter, encoding="utf-8")

    # per-section parsers, consumed in sorted section-name order
    for offset, name in enumerate(sorted(SECTIONS[corpus]), start=2):
        source = (ROOT / "scripts" / SECTIONS[corpus][name]).read_text(encoding="utf-8")
        (out_dir / f"script_init-{offset}.txt").write_text(source, encoding="utf-8")

    # retrieval fixtures: the suite runs graph, text, combined, hybrid per
    # question, so graph and text responses are each consumed twice
    for idx, (gq, tq, hq, ans) in enumerate(QA_FIXTURES[corpus]):
        for rep in (1, 2):
            seq = 2 * idx + rep
            (out_dir / f"query_graph-{seq}.txt").write_text(gq + "\n", encoding="utf-8")
            (out_dir / f"query_text-{seq}.txt").write_text(tq + "\n", encoding="utf-8")
        (out_dir / f"query_hybrid-{idx + 1}.txt").write_text(hq + "\n", encoding="utf-8")
        for rep in range(1, len(STRATEGY_ORDER) + 1):
            seq = len(STRATEGY_ORDER) * idx + rep
            (out_dir / f"synthesize-{seq}.txt").write_text(ans + "\n", encoding="utf-8")


def main():
    log_path = ROOT / "corpora" / "logs" / "nova.log"
    log_path.parent.mkdir(parents=True, exist_ok=True)
    log_path.write_text(generate_log_corpus(), encoding="utf-8")
    for corpus in ("logs", "configs"):
        write_prompt_fixtures(corpus)
    n_files = sum(1 for _ in (ROOT / "prompts").rglob("*.txt"))
    print(json.dumps({"log_lines": 500, "prompt_fixtures": n_files}))


if __name__ == "__main__":
    main()
