"""Document models for algebra, frame and model files.

Files are YAML or JSON (JSON is read through the YAML loader). The models only
check document shape; algebraic validation happens in the constructors.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

logger = logging.getLogger(__name__)


class ChainSpec(BaseModel):
    """Shorthand for a catalog chain."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["godel", "lukasiewicz"]
    size: int

    @field_validator("size", mode="after")
    @classmethod
    def validate_size(cls, v: int) -> int:
        """Chains need at least two elements."""
        if v < 2:
            raise ValueError(f"Chain size must be at least 2, got {v}")
        return v


class AlgebraDocument(BaseModel):
    """A finite quantale given by tables or by the chain shorthand."""

    model_config = ConfigDict(extra="forbid")

    names: Optional[list[str]] = None
    leq: Optional[list[list[bool]]] = None
    prod: Optional[list[list[int]]] = None
    chain: Optional[ChainSpec] = None
    nucleus: Optional[list[int]] = None
    filter: Optional[list[int]] = None

    @model_validator(mode="after")
    def validate_shape(self) -> AlgebraDocument:
        """Require either full tables or the chain shorthand, with square tables."""
        tables = (self.names, self.leq, self.prod)
        if self.chain is not None:
            if any(t is not None for t in tables):
                raise ValueError("Use either 'chain' or 'names'/'leq'/'prod', not both")
            return self

        if any(t is None for t in tables):
            raise ValueError("Algebra needs 'names', 'leq' and 'prod' (or 'chain')")

        n = len(self.names)
        if n == 0:
            raise ValueError("Algebra carrier must be nonempty")
        if len(set(self.names)) != n:
            raise ValueError("Element names must be distinct")
        for label, table in (("leq", self.leq), ("prod", self.prod)):
            if len(table) != n or any(len(row) != n for row in table):
                raise ValueError(f"'{label}' must be a {n}x{n} table")
        for i, row in enumerate(self.prod):
            for j, value in enumerate(row):
                if not 0 <= value < n:
                    raise ValueError(f"prod[{i}][{j}] = {value} is not an element index")
        return self


class FrameDocument(BaseModel):
    """A finite SO-monoid, given by tables or as the dual of an algebra."""

    model_config = ConfigDict(extra="forbid")

    names: Optional[list[str]] = None
    leq: Optional[list[list[bool]]] = None
    prod: Optional[list[list[int]]] = None
    dual_of: Optional[Union[str, AlgebraDocument]] = None
    conucleus: Optional[list[int]] = None

    @model_validator(mode="after")
    def validate_shape(self) -> FrameDocument:
        """Require either full tables or 'dual_of'."""
        tables = (self.names, self.leq, self.prod)
        if self.dual_of is not None:
            if any(t is not None for t in tables):
                raise ValueError("Use either 'dual_of' or 'names'/'leq'/'prod', not both")
            return self
        if any(t is None for t in tables):
            raise ValueError("Frame needs 'names', 'leq' and 'prod' (or 'dual_of')")
        n = len(self.names)
        for label, table in (("leq", self.leq), ("prod", self.prod)):
            if len(table) != n or any(len(row) != n for row in table):
                raise ValueError(f"'{label}' must be a {n}x{n} table")
        return self


class ModelDocument(BaseModel):
    """A modal Kripke model: frame, conucleus, constant domain, atomic forcing."""

    model_config = ConfigDict(extra="forbid")

    frame: Union[str, FrameDocument]
    delta: Union[Literal["identity"], list[int]] = "identity"
    domain: list[str] = []
    atomic: dict[str, list[Union[int, str]]] = {}

    @field_validator("domain", mode="after")
    @classmethod
    def validate_domain(cls, v: list[str]) -> list[str]:
        """Constant names must be distinct identifiers."""
        if len(set(v)) != len(v):
            raise ValueError("Domain constants must be distinct")
        for name in v:
            if not name.isidentifier():
                raise ValueError(f"Domain constant must be an identifier, got '{name}'")
        return v


def load_document(source: str) -> tuple[dict | None, str | None]:
    """Load a YAML/JSON document from a file, or from stdin with '-'.

    Returns:
        tuple: (data, error).
    """
    try:
        if source == "-":
            content = sys.stdin.read()
        else:
            path = Path(source)
            if not path.exists():
                return None, f"File not found: {source}"
            content = path.read_text(encoding="utf-8")

        data = yaml.safe_load(content)
        if data is None:
            return None, "Empty document"
        if not isinstance(data, dict):
            return None, "Document must be a mapping"
        return data, None
    except yaml.YAMLError as e:
        return None, f"Invalid YAML/JSON: {e}"


def parse_text(text: str) -> tuple[dict | None, str | None]:
    """Parse document text (YAML or JSON). Returns (data, error)."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        return None, f"Invalid YAML/JSON: {e}"
    if not isinstance(data, dict):
        return None, "Document must be a mapping"
    return data, None


def dump_json(data: dict) -> str:
    """Serialize a document with a stable key order."""
    return json.dumps(data, indent=2, ensure_ascii=False)
