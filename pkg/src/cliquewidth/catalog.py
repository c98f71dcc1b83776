"""Named graphs shipped as graph6 data files, plus the reference
clique-width values published for them."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .graph import Graph, GraphError, paley_graph, parse_graph6, petersen_graph


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    n: int
    m: int
    reference_cwd: int | None
    source: str


def _parse_meta(line: str) -> dict[str, str]:
    head, _, source = line.partition(" source=")
    meta = dict(tok.split("=", 1) for tok in head.split())
    meta["source"] = source.strip()
    return meta


def _data_dir():
    return resources.files("cliquewidth") / "data" / "catalog"


def _read(name: str) -> tuple[str, dict[str, str]]:
    path = _data_dir() / f"{name}.g6"
    if not path.is_file():
        raise GraphError(f"unknown graph {name!r}")
    g6, meta = path.read_text().splitlines()[:2]
    return g6, _parse_meta(meta)


# generated graphs that also appear in the reference table
_GENERATED = {
    "petersen": (petersen_graph, 5, "generalized Petersen graph GP(5,2)"),
    "paley-13": (lambda: paley_graph(13), 9, "quadratic residues mod 13"),
    "paley-17": (lambda: paley_graph(17), 11, "quadratic residues mod 17"),
}


def load_catalog_graph(name: str) -> Graph:
    key = name.lower()
    if key in _GENERATED:
        return _GENERATED[key][0]()
    g6, meta = _read(key)
    g = parse_graph6(g6, name=key)
    if g.n != int(meta["n"]) or g.m != int(meta["m"]):
        raise GraphError(f"catalog entry {key} disagrees with its metadata")
    return g


def catalog_entries() -> list[CatalogEntry]:
    entries = []
    for name, (fn, cwd, src) in _GENERATED.items():
        g = fn()
        entries.append(CatalogEntry(name, g.n, g.m, cwd, src))
    for path in _data_dir().iterdir():
        if not path.name.endswith(".g6"):
            continue
        _, meta = _read(path.name[:-3])
        cwd = meta.get("cwd")
        entries.append(CatalogEntry(meta["name"], int(meta["n"]), int(meta["m"]),
                                    int(cwd) if cwd else None, meta["source"]))
    return sorted(entries, key=lambda e: e.name)


def catalog_entry(name: str) -> CatalogEntry:
    for e in catalog_entries():
        if e.name == name.lower():
            return e
    raise GraphError(f"unknown graph {name!r}")
