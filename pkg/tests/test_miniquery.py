"""Mini query language: parsing, errors, and execution semantics."""

import pytest

from fastrag.extraction import EntityRecord
from fastrag.kg import build_graph
from fastrag.miniquery import QueryParseError, parse_query, run_query


@pytest.fixture(scope="module")
def small_graph():
    ents = [
        EntityRecord("Device", {"hostname": "r1", "os": "ios",
                                "interface": [{"name": "Gi0/0", "ip": "10.0.0.1"},
                                              {"name": "Gi0/1", "ip": "10.0.1.1"},
                                              {"name": "Lo0", "ip": "1.1.1.1"}]},
                     ["hostname r1"]),
        EntityRecord("Device", {"hostname": "r2", "os": "junos",
                                "interface": [{"name": "Gi0/0", "ip": "10.0.0.2"}]},
                     ["hostname r2"]),
        EntityRecord("Server", {"name": "ntp1", "port": 123}, ["server ntp1"]),
    ]
    return build_graph(ents)


class TestParsing:
    def test_full_query_shape(self):
        q = parse_query('MATCH (d:Device)-[HAS_CHILD]->(i:interface) '
                        'WHERE d.hostname = "r1" AND i.name <> "Lo0" '
                        'RETURN d.hostname, i.ip LIMIT 5')
        assert [(n.var, n.label) for n in q.nodes] == [("d", "Device"), ("i", "interface")]
        assert q.relations == ["HAS_CHILD"]
        assert len(q.where) == 2 and q.where[1][0] == "AND"
        assert q.items == ["d.hostname", "i.ip"]
        assert q.limit == 5

    def test_label_is_optional(self):
        q = parse_query("MATCH (n) RETURN n")
        assert q.nodes[0].label is None

    def test_numeric_literals(self):
        q = parse_query("MATCH (s:Server) WHERE s.port = 123 RETURN s")
        assert q.where[0][1].literal == 123
        q = parse_query("MATCH (s:Server) WHERE s.load = 1.5 RETURN s")
        assert q.where[0][1].literal == 1.5

    def test_missing_match_reports_position(self):
        with pytest.raises(QueryParseError, match="position 0"):
            parse_query("RETURN n")

    def test_missing_return(self):
        with pytest.raises(QueryParseError, match="RETURN"):
            parse_query("MATCH (n)")

    def test_bad_operator(self):
        with pytest.raises(QueryParseError, match="position"):
            parse_query('MATCH (n) WHERE n.a >= 3 RETURN n')
        with pytest.raises(QueryParseError, match="CONTAINS"):
            parse_query('MATCH (n) WHERE n.a IS 3 RETURN n')

    def test_unexpected_character(self):
        with pytest.raises(QueryParseError, match="unexpected character"):
            parse_query("MATCH (n) RETURN n; DROP")

    def test_keyword_not_allowed_as_variable(self):
        with pytest.raises(QueryParseError):
            parse_query("MATCH (MATCH) RETURN MATCH")


class TestExecution:
    def test_label_scan(self, small_graph):
        table = run_query(small_graph, "MATCH (d:Device) RETURN d.hostname")
        assert table.columns == ["d.hostname"]
        assert table.rows == [["r1"], ["r2"]]

    def test_unknown_label_yields_no_rows(self, small_graph):
        table = run_query(small_graph, "MATCH (x:Nope) RETURN x")
        assert table.rows == []

    def test_hop_with_property_filter(self, small_graph):
        table = run_query(small_graph,
                          'MATCH (d:Device)-[HAS_CHILD]->(i:interface) '
                          'WHERE d.hostname = "r1" AND i.name = "Gi0/0" '
                          'RETURN i.ip')
        assert table.rows == [["10.0.0.1"]]

    def test_contains(self, small_graph):
        table = run_query(small_graph,
                          'MATCH (i:interface) WHERE i.ip CONTAINS "10.0." '
                          'RETURN i.name')
        assert [r[0] for r in table.rows] == ["Gi0/0", "Gi0/1", "Gi0/0"]

    def test_not_equals(self, small_graph):
        table = run_query(small_graph,
                          'MATCH (d:Device) WHERE d.os <> "ios" RETURN d.hostname')
        assert table.rows == [["r2"]]

    def test_numeric_equality(self, small_graph):
        table = run_query(small_graph,
                          "MATCH (s:Server) WHERE s.port = 123 RETURN s.name")
        assert table.rows == [["ntp1"]]

    def test_or_is_left_associative(self, small_graph):
        table = run_query(small_graph,
                          'MATCH (d:Device) WHERE d.os = "ios" OR d.os = "junos" '
                          'RETURN d.hostname')
        assert table.rows == [["r1"], ["r2"]]

    def test_limit(self, small_graph):
        table = run_query(small_graph,
                          "MATCH (i:interface) RETURN i.name LIMIT 2")
        assert len(table.rows) == 2

    def test_text_condition(self, small_graph):
        table = run_query(small_graph,
                          'MATCH (l:Line) WHERE TEXT(l, "ntp1") RETURN l.text')
        assert table.rows == [["server ntp1"]]

    def test_node_projection_shape(self, small_graph):
        table = run_query(small_graph, "MATCH (s:Server) RETURN s")
        assert table.rows[0][0]["label"] == "Server"
        assert table.rows[0][0]["properties"]["name"] == "ntp1"

    def test_missing_property_projects_none(self, small_graph):
        table = run_query(small_graph, "MATCH (s:Server) RETURN s.bogus")
        assert table.rows == [[None]]

    def test_unknown_where_variable(self, small_graph):
        with pytest.raises(QueryParseError, match="unknown variable"):
            run_query(small_graph, 'MATCH (d:Device) WHERE x.a = "b" RETURN d')

    def test_unknown_return_variable(self, small_graph):
        with pytest.raises(QueryParseError, match="unknown variable"):
            run_query(small_graph, "MATCH (d:Device) RETURN q")

    def test_rows_ordered_by_binding_ids(self, small_graph):
        table = run_query(small_graph,
                          "MATCH (d:Device)-[HAS_CHILD]->(i) RETURN i")
        ids = [row[0]["id"] for row in table.rows]
        assert ids == sorted(ids)


class TestOnBundledGraphs:
    def test_device_census(self, configs_graph):
        table = run_query(configs_graph, "MATCH (d:Device) RETURN d.hostname")
        assert table.rows == [["as1border1"], ["as1core1"], ["as2border1"],
                              ["as2core1"], ["as3border1"]]

    def test_interface_address_lookup(self, configs_graph):
        table = run_query(configs_graph,
                          'MATCH (d:Device)-[HAS_CHILD]->(i:interface) '
                          'WHERE d.hostname = "as1border1" AND i.name CONTAINS "0/0" '
                          'RETURN i.ip_address')
        assert table.rows == [["10.12.11.1"]]

    def test_multi_hop_line_reachability(self, configs_graph):
        table = run_query(configs_graph,
                          'MATCH (d:Device)-[HAS_LINE]->(l:Line) '
                          'WHERE d.hostname = "as1core1" RETURN l.text')
        assert any("hostname as1core1" in row[0] for row in table.rows)

    def test_count_style_query_over_logs(self, logs_graph):
        table = run_query(logs_graph,
                          'MATCH (r:ApiRequest) WHERE r.url CONTAINS "servers/detail" '
                          'RETURN r.url')
        assert len(table.rows) > 0
        assert all("servers/detail" in row[0] for row in table.rows)
