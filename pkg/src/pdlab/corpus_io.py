"""Bundled example diagrams and `corpus:<name>` resolution."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

from .diagram import PlabicGraph, parse_plabic

PREFIX = "corpus:"


def corpus_names() -> list[str]:
    return sorted(p.name[: -len(".plabic")] for p in files("pdlab").joinpath("corpus").iterdir()
                  if p.name.endswith(".plabic"))


def corpus_text(name: str) -> str:
    path = files("pdlab").joinpath("corpus", f"{name}.plabic")
    if not path.is_file():
        raise FileNotFoundError(f"no corpus entry {name!r}; known: {', '.join(corpus_names())}")
    return path.read_text()


def load_corpus(name: str) -> PlabicGraph:
    return parse_plabic(corpus_text(name))


def read_text(ref: str) -> str:
    if ref.startswith(PREFIX):
        return corpus_text(ref[len(PREFIX):])
    return Path(ref).read_text()


def load_diagram(ref: str) -> PlabicGraph:
    return parse_plabic(read_text(ref))
