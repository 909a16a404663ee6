"""Turn a reasoning tree into a system utterance with deterministic templates.

Template lines are `act<TAB>arity<TAB>template`. Arity counts the leaves that
the surface form names (0, 1, or 2); the special arity `root` covers trees that
never got past the dialog act. Slots: {middle}, {item1}, {item2}, {entity}.
"""

from __future__ import annotations

from importlib import resources

from .reasoning import ReasoningTree, TreeNode

ROOT_ARITY = "root"


class TemplateSet:
    def __init__(self, templates: dict[tuple[str, str], str]):
        self.templates = dict(templates)

    def lookup(self, act: str, arity: str) -> str:
        key = (act, arity)
        if key in self.templates:
            return self.templates[key]
        generic = ("*", arity)
        if generic in self.templates:
            return self.templates[generic]
        raise KeyError(f"no template for act={act!r} arity={arity!r}")


def load_templates(path) -> TemplateSet:
    templates: dict[tuple[str, str], str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path} line {lineno}: expected act<TAB>arity<TAB>template")
            act, arity, template = parts
            if arity != ROOT_ARITY and arity not in ("0", "1", "2"):
                raise ValueError(f"{path} line {lineno}: arity must be 0, 1, 2 or 'root'")
            templates[(act, arity)] = template
    if not templates:
        raise ValueError(f"{path}: no templates")
    return TemplateSet(templates)


def default_templates() -> TemplateSet:
    with resources.as_file(resources.files("convrec.data") / "templates.tsv") as p:
        return load_templates(p)


def _named_leaves(tree: ReasoningTree) -> list[TreeNode]:
    """Up to two leaves to surface, round-robin across middle nodes so a
    two-interest tree names one item per interest."""
    queues = [list(mid.children) for mid in tree.root.children]
    picked: list[TreeNode] = []
    while len(picked) < 2 and any(queues):
        for q in queues:
            if q:
                picked.append(q.pop(0))
                if len(picked) == 2:
                    break
    return picked


def realize(tree: ReasoningTree, templates: TemplateSet) -> str:
    """Deterministic lowercase surface form for a tree."""
    if not tree.root.children:
        text = templates.lookup(tree.act, ROOT_ARITY)
        return text.lower()
    middle = tree.root.children[0]
    leaves = _named_leaves(tree)
    template = templates.lookup(tree.act, str(len(leaves)))
    slots = {
        "middle": middle.name,
        "entity": middle.name,
        "item1": leaves[0].name if len(leaves) > 0 else "",
        "item2": leaves[1].name if len(leaves) > 1 else "",
    }
    return template.format(**slots).lower()
