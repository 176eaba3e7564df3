"""The six subtyping rules against the corpus universes and synthetic shapes."""

from hashcl.model import (
    Context,
    EMPTY_CONTEXT,
    HashType,
    Shape,
    TopType,
    UnitSig,
    VarType,
)
from hashcl.parser import parse, parse_type_ref
from hashcl.subtyping import SubtypeQuery, is_subtype, shape_subtype, subtypes
from hashcl.syntax import Kind
from hashcl.tracelang import TraceLang
from hashcl.typer import type_apply, type_concrete

from conftest import CORPUS


def query(left, right, gamma=EMPTY_CONTEXT):
    return SubtypeQuery(gamma, left, right)


def channel_demand(reg):
    return type_apply(parse_type_ref("Channel[MPIFull, Vector]"), EMPTY_CONTEXT, reg).type


def candidate(reg, i):
    cfg = parse((CORPUS / "channels" / f"ChannelImpl{i}.hcl").read_text())
    return type_concrete(cfg, reg).type


class TestChannelUniverse:
    def test_all_candidates_below_demand(self, channels_reg):
        demand = channel_demand(channels_reg)
        for i in (1, 2, 3, 4):
            ok, trace = is_subtype(query(candidate(channels_reg, i), demand), channels_reg)
            assert ok, trace.render()

    def test_reversed_queries_fail_for_proper_approximations(self, channels_reg):
        demand = channel_demand(channels_reg)
        for i in (2, 3, 4):
            ok, trace = is_subtype(query(demand, candidate(channels_reg, i)), channels_reg)
            assert not ok, trace.render()

    def test_contravariant_argument_rule(self, channels_reg):
        # tuned for the weaker environment and the more general data: usable
        # where the stronger pair is demanded, never the other way round
        weak = candidate(channels_reg, 4)  # Channel <| [MPIBasic, Data]
        strong = candidate(channels_reg, 1)  # Channel <| [MPIFull, Vector]
        assert subtypes(weak, strong, channels_reg)
        assert not subtypes(strong, weak, channels_reg)

    def test_hierarchy_axioms(self, channels_reg):
        mpifull = channels_reg.abstract_type("MPIFull")
        mpibasic = channels_reg.abstract_type("MPIBasic")
        assert subtypes(mpifull, mpibasic, channels_reg)
        assert not subtypes(mpibasic, mpifull, channels_reg)

    def test_unrelated_same_shape_roots_are_not_subtypes(self, channels_reg):
        # MPIBasic and Data have isomorphic shapes modulo unit names; the
        # nominal system must still keep them apart.
        assert not subtypes(
            channels_reg.abstract_type("Vector"), channels_reg.abstract_type("MPIBasic"), channels_reg
        )


class TestReflexiveAndTop:
    def test_reflexive_on_closed_types(self, channels_reg, matvec_reg):
        demand = channel_demand(channels_reg)
        matvec = matvec_reg.abstract_type("MatVecProduct")
        for t in (demand, matvec, matvec.shape, TopType(Kind.DATA)):
            reg = channels_reg if t is demand else matvec_reg
            ok, _ = is_subtype(query(t, t), reg)
            assert ok

    def test_top_kind_guard(self, matvec_reg):
        shape = matvec_reg.abstract_type("MatVecProduct").shape
        assert subtypes(shape, TopType(Kind.COMPUTATION), matvec_reg)
        assert not subtypes(shape, TopType(Kind.DATA), matvec_reg)

    def test_top_is_maximal(self, channels_reg):
        top = TopType(Kind.ENVIRONMENT)
        mpifull = channels_reg.abstract_type("MPIFull")
        assert subtypes(mpifull, top, channels_reg)
        assert not subtypes(top, mpifull, channels_reg)
        assert subtypes(top, top, channels_reg)

    def test_variable_promotion(self, channels_reg):
        gamma = Context((("E", channel_demand(channels_reg).args[0]),))
        assert subtypes(VarType("E"), TopType(Kind.ENVIRONMENT), channels_reg, gamma)
        assert subtypes(VarType("E"), channels_reg.abstract_type("MPIBasic"), channels_reg, gamma)
        assert not subtypes(TopType(Kind.ENVIRONMENT), VarType("E"), channels_reg, gamma)


def unit(name, sigma=(), trace=None):
    labels = [s for s, _ in sigma]
    return UnitSig(name, tuple(sigma), trace or TraceLang.universal(labels))


def mkshape(kind=Kind.COMPUTATION, public=(), private=(), units=()):
    return Shape(kind, tuple(public), tuple(private), tuple(units))


class TestShapeRule:
    def test_reflexive_shape(self, matvec_reg):
        s = matvec_reg.abstract_type("MatVecProduct").shape
        ok, _ = shape_subtype(EMPTY_CONTEXT, s, s, matvec_reg)
        assert ok

    def test_extra_private_inner_with_extra_slice(self, channels_reg):
        # The subtype adds one private inner folded as one more slice; the
        # supertype's slice map is contained and projection erases the new
        # label, so inclusion holds against the universal trace.
        vec = HashType(channels_reg.abstract_type("Vector"), ())
        base_unit = unit("work", (("s0", ("a", "item")),))
        sup = mkshape(public=(("a", vec),), units=(base_unit,))
        sub = mkshape(
            public=(("a", vec),),
            private=(("extra", vec),),
            units=(unit("work", (("s0", ("a", "item")), ("s1", ("extra", "item")))),),
        )
        ok, trace = shape_subtype(EMPTY_CONTEXT, sub, sup, channels_reg)
        assert ok, trace.render()
        ok_rev, _ = shape_subtype(EMPTY_CONTEXT, sup, sub, channels_reg)
        assert not ok_rev  # missing inner on the narrow side

    def test_public_inner_contravariance(self, channels_reg):
        vec = HashType(channels_reg.abstract_type("Vector"), ())
        data = HashType(channels_reg.abstract_type("Data"), ())
        u = unit("work", (("s0", ("a", "item")),))
        with_vec = mkshape(public=(("a", vec),), units=(u,))
        with_data = mkshape(public=(("a", data),), units=(u,))
        ok_narrow, _ = shape_subtype(EMPTY_CONTEXT, with_vec, with_data, channels_reg)
        ok_wide, _ = shape_subtype(EMPTY_CONTEXT, with_data, with_vec, channels_reg)
        assert not ok_narrow  # Data <: Vector fails
        assert ok_wide  # Vector <: Data holds, contravariantly accepted

    def test_private_inner_covariance(self, channels_reg):
        vec = HashType(channels_reg.abstract_type("Vector"), ())
        data = HashType(channels_reg.abstract_type("Data"), ())
        u = unit("work", (("s0", ("a", "item")),))
        with_vec = mkshape(private=(("a", vec),), units=(u,))
        with_data = mkshape(private=(("a", data),), units=(u,))
        ok_cov, _ = shape_subtype(EMPTY_CONTEXT, with_vec, with_data, channels_reg)
        ok_rev, _ = shape_subtype(EMPTY_CONTEXT, with_data, with_vec, channels_reg)
        assert ok_cov
        assert not ok_rev

    def test_trace_condition(self, channels_reg):
        vec = HashType(channels_reg.abstract_type("Vector"), ())
        strict = unit("work", (("s0", ("a", "item")),), TraceLang.from_text("s0"))
        loose = unit("work", (("s0", ("a", "item")),), TraceLang.from_text("s0 s0*"))
        sub = mkshape(public=(("a", vec),), units=(loose,))
        sup = mkshape(public=(("a", vec),), units=(strict,))
        ok, trace = shape_subtype(EMPTY_CONTEXT, sub, sup, channels_reg)
        assert not ok
        assert "trace" in trace.note
        ok_rev, _ = shape_subtype(EMPTY_CONTEXT, sup, sub, channels_reg)
        assert ok_rev  # {s0} is included in s0 s0*

    def test_kind_mismatch(self):
        a = mkshape(kind=Kind.DATA, units=(unit("u"),))
        b = mkshape(kind=Kind.QUALIFIER, units=(unit("u"),))
        ok, trace = shape_subtype(EMPTY_CONTEXT, a, b)
        assert not ok and "kind" in trace.note

    def test_unit_name_sets_must_match(self):
        a = mkshape(kind=Kind.DATA, units=(unit("u"),))
        b = mkshape(kind=Kind.DATA, units=(unit("v"),))
        ok, trace = shape_subtype(EMPTY_CONTEXT, a, b)
        assert not ok and "unit name" in trace.note


class TestTraceRendering:
    def test_success_trace_names_rules(self, channels_reg):
        demand = channel_demand(channels_reg)
        ok, trace = is_subtype(query(candidate(channels_reg, 4), demand), channels_reg)
        text = trace.render()
        assert ok and "#-Component" in text and "Hierarchy" in text

    def test_failure_trace_names_first_violation(self, channels_reg):
        demand = channel_demand(channels_reg)
        ok, trace = is_subtype(query(demand, candidate(channels_reg, 2)), channels_reg)
        assert not ok
        assert "FAILED" in trace.render()
