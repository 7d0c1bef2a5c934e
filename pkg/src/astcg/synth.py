"""Seeded generator of syntactically valid, randomly shaped Java corpora.

Used by the property tests and the benchmarks.  The output exercises nested
and anonymous classes, interfaces, inheritance chains, overloads, varargs,
constructors, class-level initializers and every receiver shape the resolvers
distinguish.  It is meant to parse cleanly, not to compile.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

METHOD_NAMES = ("run", "get", "put", "apply", "size", "add", "compute", "visit", "helper", "init", "step", "merge")
PARAM_TYPES = ("int", "long", "String", "double")


@dataclass
class _Method:
    name: str
    params: list[str]
    varargs: bool = False
    static: bool = False


@dataclass
class _Class:
    name: str
    package: str
    parent: "_Class | None" = None
    interfaces: list["_Iface"] = field(default_factory=list)
    methods: list[_Method] = field(default_factory=list)
    ctor_arities: list[int] = field(default_factory=list)
    nested: list["_Class"] = field(default_factory=list)
    outer: "_Class | None" = None

    @property
    def depth(self) -> int:
        return 1 + (self.parent.depth if self.parent else 0)

    @property
    def ref(self) -> str:
        return f"{self.outer.name}.{self.name}" if self.outer else self.name


@dataclass
class _Iface:
    name: str
    package: str
    methods: list[_Method] = field(default_factory=list)


@dataclass(frozen=True)
class CorpusShape:
    classes: int = 200
    packages: int = 6
    interfaces: int = 12
    methods_per_class: tuple[int, int] = (2, 5)
    statements_per_method: tuple[int, int] = (2, 6)
    nested_probability: float = 0.25
    max_depth: int = 4
    # distinct method names beyond the twelve common ones; few names means many
    # same-name collisions, which is what stresses name-based resolution
    extra_names: int = 0

    @property
    def names(self) -> tuple[str, ...]:
        return METHOD_NAMES + tuple(f"op{i}" for i in range(self.extra_names))


def _signature(rng: random.Random, name: str, static: bool = False, class_types: list[str] = ()) -> _Method:
    arity = rng.choice((0, 0, 1, 1, 2, 3))
    pool = list(PARAM_TYPES) + list(class_types)
    params = [rng.choice(pool) for _ in range(arity)]
    varargs = bool(params) and rng.random() < 0.12
    return _Method(name, params, varargs, static)


class _Writer:
    def __init__(self, rng: random.Random, shape: CorpusShape) -> None:
        self.rng = rng
        self.shape = shape
        self.classes: list[_Class] = []
        self.ifaces: list[_Iface] = []

    # -- model -------------------------------------------------------------

    def build(self) -> None:
        rng, shape = self.rng, self.shape
        pkgs = [f"org.synth.p{i}" for i in range(shape.packages)]
        for i in range(shape.interfaces):
            iface = _Iface(f"I{i}", rng.choice(pkgs))
            for name in rng.sample(shape.names, rng.randint(1, 2)):
                m = _signature(rng, name)
                m.varargs = False
                iface.methods.append(m)
            self.ifaces.append(iface)
        top: list[_Class] = []
        while len(self.classes) < shape.classes:
            cls = _Class(f"C{len(top)}", rng.choice(pkgs))
            parents = [c for c in top if c.depth < shape.max_depth]
            if parents and rng.random() < 0.6:
                cls.parent = rng.choice(parents)
            if self.ifaces and rng.random() < 0.4:
                cls.interfaces = rng.sample(self.ifaces, rng.randint(1, min(2, len(self.ifaces))))
            self._fill(cls)
            top.append(cls)
            self.classes.append(cls)
            if rng.random() < shape.nested_probability and len(self.classes) < shape.classes:
                inner = _Class(f"N{len(self.classes)}", cls.package, outer=cls)
                self._fill(inner)
                cls.nested.append(inner)
                self.classes.append(inner)

    def _fill(self, cls: _Class) -> None:
        rng = self.rng
        lo, hi = self.shape.methods_per_class
        names = rng.sample(self.shape.names, rng.randint(lo, hi))
        recent = [c.ref for c in self.classes[-8:]]
        for name in names:
            cls.methods.append(_signature(rng, name, rng.random() < 0.1, recent))
        if rng.random() < 0.3:
            # an overload at the same arity but other parameter types
            base = rng.choice(cls.methods)
            if base.params and not base.varargs:
                alt = [t for t in PARAM_TYPES if t != base.params[0]]
                cls.methods.append(_Method(base.name, [rng.choice(alt)] + base.params[1:], False, base.static))
        for iface in cls.interfaces:
            for m in iface.methods:
                if not any(x.name == m.name and x.params == m.params for x in cls.methods):
                    cls.methods.append(_Method(m.name, list(m.params)))
        if rng.random() < 0.6:
            cls.ctor_arities = sorted(set(rng.choice((0, 1, 2)) for _ in range(rng.randint(1, 2))))

    # -- text --------------------------------------------------------------

    def _arg(self, t: str) -> str:
        return {"int": str(self.rng.randint(0, 9)), "long": f"{self.rng.randint(0, 9)}L",
                "String": '"s"', "double": "1.5"}.get(t, "null")

    def _args(self, m: _Method) -> str:
        params = list(m.params)
        if m.varargs and self.rng.random() < 0.5:
            params = params[:-1] + [params[-1]] * self.rng.randint(0, 3)
        return ", ".join(self._arg(t) for t in params)

    def _call_on(self, recv: str, cls: _Class | _Iface) -> str:
        m = self.rng.choice(cls.methods)
        return f"{recv}.{m.name}({self._args(m)})"

    def _new(self, cls: _Class) -> str:
        n = self.rng.choice(cls.ctor_arities) if cls.ctor_arities else 0
        return f"new {cls.ref}({', '.join(str(i) for i in range(n))})"

    def _statement(self, cls: _Class, params: list[tuple[str, _Class]], depth: int = 0) -> list[str]:
        rng = self.rng
        other = rng.choice(self.classes)
        kind = rng.choice((
            "implicit", "implicit", "this", "local", "param", "field", "field_access", "chain",
            "new_chain", "static", "ctor", "var", "anon", "lambda", "cast", "array", "super", "unknown",
        ))
        own = rng.choice(cls.methods)
        if kind == "implicit" or (kind == "super" and cls.parent is None):
            return [f"{own.name}({self._args(own)});"]
        if kind == "this":
            return [f"this.{own.name}({self._args(own)});"]
        if kind == "super":
            return [self._call_on("super", cls.parent) + ";"]
        if kind == "local":
            v = f"v{rng.randint(0, 999)}"
            return [f"{other.ref} {v} = {self._new(other)};", self._call_on(v, other) + ";"]
        if kind == "var":
            v = f"w{rng.randint(0, 999)}"
            return [f"var {v} = {self._new(other)};", self._call_on(v, other) + ";"]
        if kind == "param" and params:
            name, ptype = rng.choice(params)
            return [self._call_on(name, ptype) + ";"]
        if kind in ("field", "param"):
            return [self._call_on("peer", self._peer(cls)) + ";"]
        if kind == "field_access":
            return [self._call_on("this.peer", self._peer(cls)) + ";"]
        if kind == "chain":
            return [f"{own.name}({self._args(own)}).toString().length();"]
        if kind == "new_chain":
            return [self._call_on(f"{self._new(other)}", other) + ";"]
        if kind == "static":
            statics = [c for c in self.classes if any(m.static for m in c.methods)]
            if statics:
                target = rng.choice(statics)
                m = rng.choice([m for m in target.methods if m.static])
                return [f"{target.ref}.{m.name}({self._args(m)});"]
            return [f"{own.name}({self._args(own)});"]
        if kind == "ctor":
            return [f"Object o{rng.randint(0, 999)} = {self._new(other)};"]
        if kind == "anon" and self.ifaces and depth == 0:
            iface = rng.choice(self.ifaces)
            lines = [f"{iface.name} a{rng.randint(0, 999)} = new {iface.name}() {{"]
            for m in iface.methods:
                ps = ", ".join(f"{t} q{i}" for i, t in enumerate(m.params))
                lines.append(f"    public int {m.name}({ps}) {{")
                lines += ["        " + s for s in self._statement(cls, [], depth + 1)]
                lines += ["        return 0;", "    }"]
            lines.append("};")
            return lines
        if kind == "lambda":
            return [f"Runnable r{rng.randint(0, 999)} = () -> {own.name}({self._args(own)});"]
        if kind == "cast":
            return [self._call_on(f"(({other.ref}) null)", other) + ";"]
        if kind == "array":
            return [f"{other.ref}[] arr = new {other.ref}[1];", self._call_on("arr[0]", other) + ";"]
        return [f"System.out.println({self._arg('String')});"]

    def _peer(self, cls: _Class) -> _Class:
        return self._peers[cls.ref]

    def _method_text(self, cls: _Class, m: _Method, indent: str) -> list[str]:
        decl = []
        typed: list[tuple[str, _Class]] = []
        for i, t in enumerate(m.params):
            decl.append(f"{t}... a{i}" if m.varargs and i == len(m.params) - 1 else f"{t} a{i}")
            if t in self._by_ref and not (m.varargs and i == len(m.params) - 1):
                typed.append((f"a{i}", self._by_ref[t]))
        mods = "public static" if m.static else "public"
        lines = [f"{indent}{mods} int {m.name}({', '.join(decl)}) {{"]
        lo, hi = self.shape.statements_per_method
        for _ in range(self.rng.randint(lo, hi)):
            stmts = [self._static_stmt(cls)] if m.static else self._statement(cls, typed)
            lines += [f"{indent}    {s}" for s in stmts]
        lines += [f"{indent}    return 0;", f"{indent}}}"]
        return lines

    def _static_stmt(self, cls: _Class) -> str:
        other = self.rng.choice(self.classes)
        return self._call_on(self._new(other), other) + ";"

    def _class_text(self, cls: _Class, indent: str) -> list[str]:
        rng = self.rng
        head = f"{indent}{'static ' if cls.outer else 'public '}class {cls.name}"
        if cls.parent:
            head += f" extends {cls.parent.ref}"
        if cls.interfaces:
            head += " implements " + ", ".join(i.name for i in cls.interfaces)
        lines = [head + " {"]
        inner = indent + "    "
        peer = self._peers[cls.ref]
        lines.append(f"{inner}{peer.ref} peer = {self._new(peer)};")
        if rng.random() < 0.3:
            lines.append(f"{inner}int cached = {self._call_on(self._new(peer), peer)};")
        if rng.random() < 0.2:
            lines += [f"{inner}static {{", f"{inner}    {self._static_stmt(cls)}", f"{inner}}}"]
        if rng.random() < 0.2:
            m = rng.choice(cls.methods)
            lines += [f"{inner}{{", f"{inner}    {m.name}({self._args(m)});", f"{inner}}}"]
        for n in cls.ctor_arities:
            ps = ", ".join(f"int k{i}" for i in range(n))
            lines.append(f"{inner}{cls.name}({ps}) {{")
            if cls.parent and cls.parent.ctor_arities and rng.random() < 0.5:
                pn = rng.choice(cls.parent.ctor_arities)
                lines.append(f"{inner}    super({', '.join(str(i) for i in range(pn))});")
            own = rng.choice(cls.methods)
            lines.append(f"{inner}    {own.name}({self._args(own)});")
            lines.append(f"{inner}}}")
        for m in cls.methods:
            lines += self._method_text(cls, m, inner)
        for nested in cls.nested:
            lines += self._class_text(nested, inner)
        lines.append(f"{indent}}}")
        return lines

    def _imports(self, package: str) -> list[str]:
        pkgs = sorted({c.package for c in self.classes} | {i.package for i in self.ifaces})
        out = []
        for p in pkgs:
            if p == package:
                continue
            out.append(f"import {p}.*;" if self.rng.random() < 0.7 else f"import {p}.Unused;")
        return out

    def files(self) -> dict[str, str]:
        self._peers = {c.ref: self.rng.choice(self.classes) for c in self.classes}
        self._by_ref = {c.ref: c for c in self.classes}
        out: dict[str, str] = {}
        for iface in self.ifaces:
            body = [f"package {iface.package};", "", f"public interface {iface.name} {{"]
            for m in iface.methods:
                ps = ", ".join(f"{t} a{i}" for i, t in enumerate(m.params))
                body.append(f"    int {m.name}({ps});")
            body.append("}")
            out[f"{iface.package.replace('.', '/')}/{iface.name}.java"] = "\n".join(body) + "\n"
        for cls in self.classes:
            if cls.outer:
                continue
            body = [f"package {cls.package};", ""] + self._imports(cls.package) + [""] + self._class_text(cls, "")
            out[f"{cls.package.replace('.', '/')}/{cls.name}.java"] = "\n".join(body) + "\n"
        return dict(sorted(out.items()))


PERF_SHAPE = CorpusShape(
    classes=1100, packages=20, interfaces=30, methods_per_class=(3, 7), statements_per_method=(3, 7),
    nested_probability=0.1, extra_names=600,
)


def generate_corpus(seed: int, shape: CorpusShape = CorpusShape()) -> dict[str, str]:
    """Relative path -> Java source, fully determined by ``seed`` and ``shape``."""
    writer = _Writer(random.Random(seed), shape)
    writer.build()
    return writer.files()


def write_corpus(root: str | Path, files: dict[str, str]) -> Path:
    root = Path(root)
    for rel, text in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return root
