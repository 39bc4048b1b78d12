"""Dataset ingestion, attribute roles, and categorical encoding.

A table is held column-major as integer category codes. Each attribute has a
fixed, ordered domain of string labels; the code of a value is its position in
that domain. Domains are either pinned in the roles config or inferred as the
sorted set of observed values, so encoding is deterministic across runs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    EmptyDatasetError,
    IoFailureError,
    MissingRoleError,
    MultipleLabelsError,
    NoLabelError,
    UnknownCategoryError,
)

MISSING_TOKEN = "<NA>"


class Role(Enum):
    SENSITIVE = "sensitive"
    INADMISSIBLE = "inadmissible"
    ADMISSIBLE = "admissible"
    ADDITIONAL = "additional"
    LABEL = "label"


#: Roles whose attributes may legitimately drive the label.
FAIR_ROLES = frozenset({Role.ADMISSIBLE, Role.ADDITIONAL})


@dataclass(frozen=True)
class AttributeSchema:
    """One attribute: its name, role, and ordered categorical domain."""

    name: str
    role: Role
    domain: tuple[str, ...]

    def __post_init__(self):
        if len(self.domain) < 1:
            raise ConfigError(f"attribute {self.name!r}: domain must be non-empty")
        if len(set(self.domain)) != len(self.domain):
            raise ConfigError(f"attribute {self.name!r}: domain labels must be unique")

    @property
    def size(self) -> int:
        return len(self.domain)

    def encode(self, value: str) -> int:
        try:
            return self.domain.index(value)
        except ValueError:
            raise UnknownCategoryError(
                f"value {value!r} not in domain of attribute {self.name!r}"
            ) from None

    def decode(self, code: int) -> str:
        return self.domain[code]


@dataclass(frozen=True, eq=False)
class EncodedDataset:
    """Immutable column-major table of category codes.

    Equality is identity: columns are arrays, so compare fields explicitly.
    """

    schema: tuple[AttributeSchema, ...]
    columns: tuple[np.ndarray, ...]
    n_rows: int
    _name_to_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.schema) != len(self.columns):
            raise EmptyDatasetError("schema and columns disagree in length")
        for attr, col in zip(self.schema, self.columns):
            if len(col) != self.n_rows:
                raise EmptyDatasetError(f"column {attr.name!r} has wrong length")
            if len(col) and (col.min() < 0 or col.max() >= attr.size):
                raise UnknownCategoryError(f"column {attr.name!r} holds out-of-domain codes")
        object.__setattr__(self, "_name_to_index", {a.name: i for i, a in enumerate(self.schema)})

    @property
    def n_attrs(self) -> int:
        return len(self.schema)

    def attr_index(self, name: str) -> int:
        return self._name_to_index[name]

    def column(self, i: int) -> np.ndarray:
        return self.columns[i]

    def domain_size(self, i: int) -> int:
        return self.schema[i].size

    @property
    def label_index(self) -> int:
        for i, a in enumerate(self.schema):
            if a.role is Role.LABEL:
                return i
        raise NoLabelError("dataset schema carries no label attribute")

    def indices_with_role(self, *roles: Role) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.schema) if a.role in roles)

    @property
    def non_label_indices(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.schema) if a.role is not Role.LABEL)

    def code_matrix(self) -> np.ndarray:
        """Rows x attrs matrix of codes (copy)."""
        return np.stack(self.columns, axis=1)


# ---------------------------------------------------------------- roles config

def parse_roles_config(doc: dict) -> dict[str, tuple[Role, tuple[str, ...] | None]]:
    """Validate a roles-config document into {name: (role, pinned_domain)}."""
    if not isinstance(doc, dict) or "attributes" not in doc:
        raise ConfigError('roles config must be an object with an "attributes" list')
    out: dict[str, tuple[Role, tuple[str, ...] | None]] = {}
    labels = 0
    for entry in doc["attributes"]:
        try:
            name = entry["name"]
            role = Role(entry["role"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad roles-config entry: {entry!r}") from exc
        if name in out:
            raise ConfigError(f"duplicate roles-config entry for {name!r}")
        domain = entry.get("domain")
        if domain is not None:
            domain = tuple(str(v) for v in domain)
        if role is Role.LABEL:
            labels += 1
        out[name] = (role, domain)
    if labels == 0:
        raise NoLabelError("roles config assigns no label attribute")
    if labels > 1:
        raise MultipleLabelsError("roles config assigns more than one label attribute")
    return out


def load_roles_config(path: str | Path) -> dict[str, tuple[Role, tuple[str, ...] | None]]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailureError(f"cannot read roles config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"roles config {path} is not valid JSON: {exc}") from exc
    return parse_roles_config(doc)


# ---------------------------------------------------------------- CSV I/O

def load_csv(path: str | Path, roles: dict[str, tuple[Role, tuple[str, ...] | None]]) -> EncodedDataset:
    """Read a header-first CSV and encode it against the roles config.

    Pinned domains take precedence; otherwise the domain is the sorted set of
    observed values. Empty cells become the literal category "<NA>". Row order
    is preserved.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise EmptyDatasetError(f"{path}: no header row") from None
            rows = list(reader)
    except OSError as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc

    if not header:
        raise EmptyDatasetError(f"{path}: header row has no columns")
    if len(set(header)) != len(header):
        raise EmptyDatasetError(f"{path}: duplicate column names in header")
    if not rows:
        raise EmptyDatasetError(f"{path}: no data rows")

    for name in header:
        if name not in roles:
            raise MissingRoleError(f"column {name!r} has no entry in the roles config")
    label_count = sum(1 for name in header if roles[name][0] is Role.LABEL)
    if label_count == 0:
        raise NoLabelError("no CSV column carries the label role")
    if label_count > 1:
        raise MultipleLabelsError("more than one CSV column carries the label role")

    n_cols = len(header)
    raw_cols: list[list[str]] = [[] for _ in range(n_cols)]
    for r, row in enumerate(rows):
        if len(row) != n_cols:
            raise EmptyDatasetError(f"{path}: row {r + 2} has {len(row)} cells, expected {n_cols}")
        for c, cell in enumerate(row):
            raw_cols[c].append(cell if cell != "" else MISSING_TOKEN)

    schema: list[AttributeSchema] = []
    columns: list[np.ndarray] = []
    for c, name in enumerate(header):
        role, pinned = roles[name]
        domain = pinned if pinned is not None else tuple(sorted(set(raw_cols[c])))
        attr = AttributeSchema(name=name, role=role, domain=domain)
        lookup = {v: i for i, v in enumerate(domain)}
        codes = np.empty(len(rows), dtype=np.int64)
        for r, value in enumerate(raw_cols[c]):
            try:
                codes[r] = lookup[value]
            except KeyError:
                raise UnknownCategoryError(
                    f"{path}: row {r + 2}, column {name!r}: value {value!r} not in pinned domain"
                ) from None
        schema.append(attr)
        columns.append(codes)

    return EncodedDataset(schema=tuple(schema), columns=tuple(columns), n_rows=len(rows))


def write_csv(dataset: EncodedDataset, path: str | Path) -> None:
    """Decode codes back to labels and write an RFC-4180 CSV with header."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([a.name for a in dataset.schema])
            decoded = [
                np.asarray(a.domain, dtype=object)[col]
                for a, col in zip(dataset.schema, dataset.columns)
            ]
            for r in range(dataset.n_rows):
                writer.writerow([decoded[c][r] for c in range(dataset.n_attrs)])
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc


def roles_of_dataset(dataset: EncodedDataset) -> dict[str, tuple[Role, tuple[str, ...] | None]]:
    """Roles config (with pinned domains) that reproduces this dataset's schema."""
    return {a.name: (a.role, a.domain) for a in dataset.schema}
