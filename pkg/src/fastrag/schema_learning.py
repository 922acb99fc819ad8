"""Iterative JSON-schema induction and its Step-1/Step-2 projections."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import jsonschema

from . import prompts
from .gateway import LlmGateway, PromptRequest, PromptResponse, RetryPolicy, StageExhausted
from .ingest import Chunk

log = logging.getLogger(__name__)

INPUT_DATA = "input_data"
INPUT_DATA_SCHEMA = {
    "type": "string",
    "description": "Source data lines that define this entity.",
}


@dataclass
class SchemaDoc:
    json_schema: dict
    entity_types: list[tuple[str, str]]  # (name, description)


@dataclass
class Step1Schema:
    sections: list[tuple[str, str]]  # (name, description)

    @property
    def section_names(self) -> list[str]:
        return [name for name, _ in self.sections]

    def to_json_schema(self) -> dict:
        props = {
            name: {
                "type": "array",
                "description": desc,
                "items": {
                    "type": "object",
                    "properties": {INPUT_DATA: dict(INPUT_DATA_SCHEMA)},
                    "required": [INPUT_DATA],
                },
            }
            for name, desc in self.sections
        }
        return {"type": "object", "properties": props}


SectionSchemaMap = dict[str, dict]


def extract_json(text: str) -> dict:
    """Parse a JSON object out of an LLM response, tolerating code fences."""
    stripped = text.strip()
    if stripped.startswith("```"):
        first_nl = stripped.index("\n") if "\n" in stripped else len(stripped)
        stripped = stripped[first_nl + 1:]
        if stripped.rstrip().endswith("```"):
            stripped = stripped.rstrip()[:-3]
    try:
        return json.loads(stripped)
    except json.JSONDecodeError:
        start, end = stripped.find("{"), stripped.rfind("}")
        if start == -1 or end <= start:
            raise
        return json.loads(stripped[start:end + 1])


def _object_depth(schema: dict, path: str) -> tuple[int, str]:
    """Depth of object nesting and the path of the deepest object."""
    if not isinstance(schema, dict):
        return 0, path
    if schema.get("type") == "array" or "items" in schema:
        return _object_depth(schema.get("items", {}), f"{path}.items")
    if schema.get("type") == "object" or "properties" in schema:
        deepest = (1, path)
        for name, sub in (schema.get("properties") or {}).items():
            d, p = _object_depth(sub, f"{path}.properties.{name}")
            if d + 1 > deepest[0]:
                deepest = (d + 1, p)
        return deepest
    return 0, path


def _first_oversized(schema: dict, path: str, max_properties: int) -> str | None:
    if not isinstance(schema, dict):
        return None
    props = schema.get("properties")
    if isinstance(props, dict):
        if len(props) > max_properties:
            return path
        for name, sub in props.items():
            hit = _first_oversized(sub, f"{path}.properties.{name}", max_properties)
            if hit:
                return hit
    if "items" in schema:
        return _first_oversized(schema["items"], f"{path}.items", max_properties)
    return None


def validate_schema(doc: dict, max_depth: int = 3,
                    max_properties: int = 15) -> str | None:
    """Meta-schema validity plus the depth and property-count limits."""
    try:
        jsonschema.Draft202012Validator.check_schema(doc)
    except jsonschema.SchemaError as exc:
        path = "$" + "".join(f".{p}" for p in exc.absolute_path)
        return f"schema is not a valid JSON schema at {path}: {exc.message}"
    depth, path = _object_depth(doc, "$")
    if depth > max_depth:
        return f"object nesting depth {depth} exceeds {max_depth} at {path}"
    oversized = _first_oversized(doc, "$", max_properties)
    if oversized:
        return f"more than {max_properties} properties at {oversized}"
    return None


def _entity_types(schema: dict) -> list[tuple[str, str]]:
    props = schema.get("properties")
    if not isinstance(props, dict):
        return []
    return [(name, (sub or {}).get("description", "") if isinstance(sub, dict) else "")
            for name, sub in props.items()]


def learn_schema(samples: list[Chunk], gateway: LlmGateway, policy: RetryPolicy,
                 max_depth: int = 3, max_properties: int = 15) -> SchemaDoc:
    """One init prompt, then one refine prompt per remaining sample."""
    if not samples:
        raise ValueError("learn_schema needs at least one sample")
    system = prompts.template("system")

    def validator(response: PromptResponse) -> str | None:
        try:
            doc = extract_json(response.text)
        except (json.JSONDecodeError, ValueError) as exc:
            return f"response is not valid JSON: {exc}"
        error = validate_schema(doc, max_depth, max_properties)
        if error:
            return error
        if not _entity_types(doc):
            return "schema root must be an object with at least one entity-type property"
        return None

    schema: dict | None = None
    for idx, sample in enumerate(samples):
        if idx == 0:
            stage, user = "schema_init", prompts.render("schema_init", sample=sample.text)
        else:
            stage = "schema_refine"
            user = prompts.render("schema_refine",
                                  schema=json.dumps(schema, indent=2), sample=sample.text)
        try:
            response = gateway.complete_with_validation(
                PromptRequest(stage=stage, system_text=system, user_text=user),
                validator, policy, repair_stage="schema_repair")
        except StageExhausted as exc:
            raise StageExhausted(exc.stage, exc.attempts,
                                 f"sample {idx}: {exc.last_error}") from exc
        schema = extract_json(response.text)
    assert schema is not None
    return SchemaDoc(schema, _entity_types(schema))


def derive_step1(doc: SchemaDoc) -> Step1Schema:
    if not doc.entity_types:
        raise ValueError("schema has no level-1 entity types")
    return Step1Schema(sections=list(doc.entity_types))


def _section_object_schema(sub: dict) -> dict:
    """The entity-object schema of a level-1 property (array items or object)."""
    if not isinstance(sub, dict):
        return {"type": "object", "properties": {}}
    if "items" in sub or sub.get("type") == "array":
        obj = sub.get("items") or {}
    else:
        obj = sub
    obj = json.loads(json.dumps(obj))  # deep copy
    obj.setdefault("type", "object")
    obj.setdefault("properties", {})
    if INPUT_DATA not in obj["properties"]:
        obj["properties"][INPUT_DATA] = dict(INPUT_DATA_SCHEMA)
    required = obj.get("required", [])
    if INPUT_DATA not in required:
        obj["required"] = list(required) + [INPUT_DATA]
    return obj


def derive_step2(doc: SchemaDoc) -> SectionSchemaMap:
    if not doc.entity_types:
        raise ValueError("schema has no level-1 entity types")
    props = doc.json_schema.get("properties", {})
    return {
        name: {
            "type": "array",
            "description": desc,
            "items": _section_object_schema(props.get(name, {})),
        }
        for name, desc in doc.entity_types
    }
