import pytest
from hypothesis import given, strategies as st

from astcg.model import (
    NO_RECEIVER, CallGraph, CallSite, ClassLevelKey, ClassName, MethodKey, Receiver, ReceiverKind, Region,
    SiteId, SiteKind, TargetKey, canonical_id, merge_graphs, parse_id,
)

ident = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True)
segment = st.one_of(ident, st.integers(1, 99).map(lambda n: f"anon${n}"))
package = st.lists(ident.map(str.lower), max_size=3).map(".".join)
class_name = st.builds(ClassName, package, st.tuples(ident).flatmap(
    lambda head: st.lists(segment, max_size=3).map(lambda rest: head + tuple(rest))))
type_alias = st.one_of(ident, ident.map(lambda t: t + "[]"), ident.map(lambda t: t + "..."))


@st.composite
def method_key(draw, owner=class_name):
    cls = draw(owner)
    name = draw(st.one_of(ident, st.just("<init>")))
    types = draw(st.one_of(st.none(), st.lists(type_alias, max_size=3).map(tuple)))
    arity = len(types) if types is not None else draw(st.integers(0, 5))
    return MethodKey(cls.package, cls.class_path, name, arity, types)


any_key = st.one_of(
    method_key(),
    st.builds(ClassLevelKey, class_name, st.sampled_from(list(Region))),
    st.builds(TargetKey, class_name, method_key()),
)


@given(any_key)
def test_ids_round_trip(key):
    back = parse_id(canonical_id(key))
    if isinstance(key, TargetKey) and not key.inherited:
        assert back == key.defined_in
    else:
        assert back == key


@given(any_key, any_key)
def test_ids_are_injective(a, b):
    norm = lambda k: k.defined_in if isinstance(k, TargetKey) and not k.inherited else k  # noqa: E731
    if norm(a) != norm(b):
        assert canonical_id(a) != canonical_id(b)


@given(method_key())
def test_equal_keys_hash_alike(k):
    twin = MethodKey(k.package, k.class_path, k.name, k.arity, k.param_type_aliases)
    assert twin == k and hash(twin) == hash(k) and str(twin) == str(k)


def test_frozen_examples():
    foo = MethodKey("", ("Foo",), "method1", 1)
    assert str(foo) == "Foo#method1/1"
    nested = MethodKey("org.x", ("Outer", "Inner"), "run", 0)
    assert str(nested) == "org.x.Outer$Inner#run/0"
    typed = MethodKey("", ("Bar",), "add", 2, ("int", "int"))
    assert str(typed) == "Bar#add/2(int,int)"
    inherited = TargetKey(ClassName("", ("B",)), MethodKey("", ("A",), "method", 0))
    assert str(inherited) == "B#method/0@A"
    assert str(ClassLevelKey(ClassName("p", ("Foo",)), Region.FIELDS)) == "p.Foo#<fields>"
    # '.' inside the class path would make p.A.B ambiguous with package p.A
    assert str(ClassName("p", ("A", "B"))) != str(ClassName("p.A", ("B",)))


@pytest.mark.parametrize("bad", ["", "Foo", "Foo#", "Foo#m/x", "Foo#<fields>@Bar", "#m/0"])
def test_malformed_ids(bad):
    with pytest.raises(ValueError):
        parse_id(bad)


def test_key_validation():
    with pytest.raises(ValueError):
        MethodKey("", (), "m", 0)
    with pytest.raises(ValueError):
        MethodKey("", ("A",), "m", -1)
    with pytest.raises(ValueError):
        MethodKey("", ("A",), "m", 2, ("int",))
    with pytest.raises(ValueError):
        ClassName("p", ())


def test_class_name_helpers():
    c = ClassName("p", ("A", "B"))
    assert c.alias == "B" and c.dotted == "p.A.B" and c.outer == ClassName("p", ("A",))
    assert c.nested("C") == ClassName("p", ("A", "B", "C"))
    assert ClassName("", ("A",)).outer is None


def _site(offset, container, end=None):
    return CallSite(SiteId("F.java", offset, end if end is not None else offset + 3), SiteKind.METHOD_INVOCATION,
                    "m", 0, Receiver(ReceiverKind.IMPLICIT), container, 1, offset + 1)


def test_creation_sites_have_no_receiver():
    src = MethodKey("", ("A",), "f", 0)
    with pytest.raises(ValueError):
        CallSite(SiteId("F.java", 0, 5), SiteKind.OBJECT_CREATION, "A", 0, Receiver(ReceiverKind.IMPLICIT), src)
    CallSite(SiteId("F.java", 0, 5), SiteKind.OBJECT_CREATION, "A", 0, NO_RECEIVER, src)


def test_site_ids_distinguish_nested_spans():
    # `a().b()` and `a()` start together
    assert SiteId("F.java", 10, 17) != SiteId("F.java", 10, 13)


def test_graph_set_semantics_and_merge():
    src = MethodKey("", ("A",), "f", 0)
    dst = TargetKey(ClassName("", ("A",)), MethodKey("", ("A",), "g", 0))
    g1, g2 = CallGraph(), CallGraph()
    site = SiteId("F.java", 4, 7)
    g1.add_edge(src, dst, site, (1, 5))
    g1.add_edge(src, dst, site, (1, 5))
    assert len(g1) == 1 and g1.vertices == {src, dst}
    g1.add_unresolved(_site(9, src), "nr-no-name-match")
    g2.add_unresolved(_site(9, src), "nr-no-name-match")
    g2.add_edge(src, dst, SiteId("F.java", 20, 23), (2, 1))
    merged = merge_graphs(g1, g2)
    assert len(merged) == 2
    assert len(merged.unresolved) == 1
    assert merged.edge_ids() == {("A#f/0", "A#g/0")}
    assert [e.site.offset for e in merged.sorted_edges()] == [4, 20]
