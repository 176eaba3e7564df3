"""Stub emission: structural (re-parsed) assertions, guards, determinism."""

import re

from hashcl.codegen import (
    emit_interpretation,
    gen_class,
    gen_interface,
    gen_prelude,
)
from hashcl.model import EMPTY_CONTEXT
from hashcl.parser import parse
from hashcl.registry import Registry
from hashcl.typer import type_abstract, type_concrete

from conftest import CORPUS

WHERE = re.compile(r"^\s*where (\w+): (.+?)\s*$", re.MULTILINE)
PROPERTY = re.compile(r"^\s*(?:public |private )?(\S[^={}\n]*?) (\w+) \{ ?set", re.MULTILINE)
FIELD = re.compile(r"^\s*private (\S[^={}]*?) (\w+) = null;", re.MULTILINE)


def interface_text(reg, name, unit=None):
    stubs = gen_interface(reg.lookup_abstract(name).cfg, reg)
    if unit is None:
        assert len(stubs) == 1
        return stubs[0].text
    return next(s.text for s in stubs if s.path.endswith(f"/I{unit[0].upper()}{unit[1:]}.cs"))


class TestInterfaceStub:
    def test_calculate_where_clauses(self, matvec_oo_reg):
        text = interface_text(matvec_oo_reg, "MatVecProduct")
        clauses = WHERE.findall(text)
        assert clauses == [
            ("C", "ICluster"),
            ("E", "IEnvironment<C>"),
            ("N", "INumber"),
            ("Da", "IVecPartition"),
            ("Dx", "IVecPartition"),
            ("Dv", "IVecPartition"),
        ]

    def test_calculate_properties(self, matvec_oo_reg):
        text = interface_text(matvec_oo_reg, "MatVecProduct")
        props = PROPERTY.findall(text)
        assert props == [
            ("E", "Env"),
            ("IParData<C, E, Matrix<N>, Da>", "A"),
            ("IParData<C, E, Vector<N>, Dx>", "X"),
            ("IParData<C, E, Vector<N>, Dv>", "V"),
        ]

    def test_header(self, matvec_oo_reg):
        text = interface_text(matvec_oo_reg, "MatVecProduct")
        assert "namespace MatVecProduct" in text
        assert "public interface ICalculate<C, E, N, Da, Dx, Dv> : IComputationKind" in text

    def test_channel_interfaces_have_no_properties(self, channels_reg):
        stubs = gen_interface(channels_reg.lookup_abstract("Channel").cfg, channels_reg)
        assert sorted(s.path for s in stubs) == ["Channel/IRecv.cs", "Channel/ISend.cs"]
        for stub in stubs:
            assert PROPERTY.findall(stub.text) == []
            assert ": ISynchronizerKind" in stub.text

    def test_private_inner_yields_no_interface_property(self, matvec_oo_reg):
        src = """
        computation Hidden [C: Cluster, E: Environment[C], N: Number, D: VecPartition]
        begin
          data a : ParData[C, E, Matrix[N], D] (a)
          unit work
          begin
            slice s from a.parData
          end
        end
        """
        # a supplies itself just to satisfy supply arity; it stays private
        cfg = parse(src.replace("(a)", ""))
        cfg = parse(
            """
            computation Hidden [C: Cluster, E: Environment[C], N: Number, D: VecPartition]
            begin
              environment env : E
              data a : ParData[C, E, Matrix[N], D] (env)
              unit work
              begin
                slice es from env.node
                slice s from a.parData
              end
            end
            """
        )
        stubs = gen_interface(cfg, matvec_oo_reg)
        assert PROPERTY.findall(stubs[0].text) == []  # both inners are private

    def test_unreached_variable_gets_no_clause(self, channels_reg):
        src = """
        synchronizer Spare [E: environment, D: Data]
        begin
          data buf : D
          unit side
          begin
            slice s from buf.item
          end
        end
        """
        text = gen_interface(parse(src), channels_reg)[0].text
        clauses = WHERE.findall(text)
        assert clauses == [("D", "IData")]  # E types no reachable slice


class TestClassStub:
    def test_specialized_constraints(self, matvec_oo_reg):
        cfg = matvec_oo_reg.lookup_concrete("MatVecProduct").cfg
        text = gen_class(cfg, matvec_oo_reg)[0].text
        assert WHERE.findall(text) == [
            ("C", "IGNUCluster"),
            ("E", "IMPIFull<C>"),
            ("N", "INumber"),
            ("Da", "IByRows"),
            ("Dx", "IReplicate"),
            ("Dv", "IReplicate"),
        ]

    def test_class_header_and_members(self, matvec_oo_reg):
        cfg = matvec_oo_reg.lookup_concrete("MatVecProduct").cfg
        text = gen_class(cfg, matvec_oo_reg)[0].text
        assert "public class HCalculate<C, E, N, Da, Dx, Dv> : Unit, MatVecProduct.ICalculate<C, E, N, Da, Dx, Dv>" in text
        assert FIELD.findall(text) == [
            ("E", "env"),
            ("IParData<C, E, Matrix<N>, Da>", "a"),
            ("IParData<C, E, Vector<N>, Dx>", "x"),
            ("IParData<C, E, Vector<N>, Dv>", "v"),
        ]
        assert "this.env = a.Env = x.Env = v.Env = value;" in text
        assert "public void compute()" in text
        assert "public HCalculate() { }" in text

    def test_interface_properties_all_implemented(self, matvec_oo_reg):
        iface_props = {p for _, p in PROPERTY.findall(interface_text(matvec_oo_reg, "MatVecProduct"))}
        cls_text = gen_class(matvec_oo_reg.lookup_concrete("MatVecProduct").cfg, matvec_oo_reg)[0].text
        cls_props = {p for _, p in PROPERTY.findall(cls_text)}
        assert iface_props <= cls_props

    def test_create_slices_only_for_private(self, matvec_oo_reg):
        src = """
        computation Mixed (a) [C: Cluster, E: Environment[C], N: Number, D: VecPartition]
        begin
          environment env : E
          data a : ParData[C, E, Matrix[N], D] (env)
          unit work
          begin
            slice es from env.node
            slice s from a.parData
          end
        end
        """
        abstracts = [Registry.load(CORPUS / "matvec_oo").lookup_abstract(n).cfg for n in
                     Registry.load(CORPUS / "matvec_oo").abstract_names()]
        reg = Registry.from_configs(abstracts + [parse(src)])
        impl = parse(
            "computation MixedImpl [C: GNUCluster, E: MPIFull[C], N: Number, D: Replicate] "
            "implements Mixed[C, E, N, D] version 1.0.0.0 begin unit work end"
        )
        text = gen_class(impl, reg)[0].text
        creates = [ln for ln in text.splitlines() if "BackEnd.createSlice" in ln]
        assert len(creates) == 1 and '"env"' in creates[0]
        assert "private E es" in text and "public IParData<C, E, Matrix<N>, D> S" in text

    def test_nongeneric_class_for_parameterless_implementation(self, channels_reg):
        src = "data VectorImpl implements Vector version 1.0.0.0 begin unit item end"
        text = gen_class(parse(src), channels_reg)[0].text
        assert "public class HItem : Unit, Vector.IItem" in text
        assert "<" not in text.splitlines()[2]


class TestDeterminismAndPrelude:
    def test_byte_determinism(self, matvec_oo_reg):
        cfg = matvec_oo_reg.lookup_abstract("MatVecProduct").cfg
        impl = matvec_oo_reg.lookup_concrete("MatVecProduct").cfg
        a = [(s.path, s.text) for s in gen_interface(cfg, matvec_oo_reg)]
        b = [(s.path, s.text) for s in gen_interface(cfg, matvec_oo_reg)]
        assert a == b
        c = [(s.path, s.text) for s in gen_class(impl, matvec_oo_reg)]
        d = [(s.path, s.text) for s in gen_class(impl, matvec_oo_reg)]
        assert c == d

    def test_prelude_has_all_kind_interfaces(self):
        text = gen_prelude().text
        for name in (
            "IApplicationKind",
            "IComputationKind",
            "ISynchronizerKind",
            "IDataKind",
            "IEnvironmentKind",
            "IArchitectureKind",
            "IQualifierKind",
        ):
            assert f"public interface {name}" in text
        assert "void compute();" in text
        assert "class Unit" in text and "BackEnd" in text


class TestInterpretation:
    def test_single_bound_operator_form(self, channels_reg):
        src = "synchronizer Box [Z: Data] begin unit u end"
        t = type_abstract(parse(src), EMPTY_CONTEXT, channels_reg).type
        text = emit_interpretation(t)
        assert text.startswith("λX1<:Data. ∀Y1<:X1. {∃Z<:Data; ")

    def test_two_bound_generalization(self, channels_reg):
        text = emit_interpretation(channels_reg.abstract_type("Channel"))
        assert text.startswith(
            "λX1<:Top_environment. λX2<:Data. ∀Y1<:X1. ∀Y2<:X2. "
            "{∃E<:Top_environment; ∃D<:Data; "
        )

    def test_package_form_for_implementation(self, channels_reg):
        cfg = parse((CORPUS / "channels" / "ChannelImpl4.hcl").read_text())
        t = type_concrete(cfg, channels_reg).type
        text = emit_interpretation(t)
        assert text.startswith("λY1<:MPIBasic. λY2<:Data. ({*Y1, *Y2; t} as {")
        assert "∃E<:Top_environment;" in text

    def test_dependent_bound_uses_operator_parameter(self, matvec_reg):
        text = emit_interpretation(matvec_reg.abstract_type("MatVecProduct"))
        # E's bound mentions C; in the operator row that reference is the
        # second operator parameter
        assert "λX3<:Environment <| [X2]." in text

    def test_parameterless_type_is_its_shape(self, channels_reg):
        t = channels_reg.abstract_type("Data")
        assert emit_interpretation(t) == emit_interpretation(t)
        assert "λ" not in emit_interpretation(t)
