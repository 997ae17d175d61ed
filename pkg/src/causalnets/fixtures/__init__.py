"""Nets bundled with the package: the worked examples used by the tests and CLI."""

from __future__ import annotations

from importlib import resources

from ..net import Net, parse_net


def names() -> list[str]:
    return sorted(f.name[:-4] for f in resources.files(__name__).iterdir() if f.name.endswith(".net"))


def text(name: str) -> str:
    if name.endswith(".net"):
        name = name[:-4]
    if name not in names():
        raise FileNotFoundError(f"no bundled net named {name!r}; have {names()}")
    return resources.files(__name__).joinpath(name + ".net").read_text(encoding="utf-8")


def load(name: str) -> Net:
    return parse_net(text(name))
