"""The exactly-once folding rule and the other structural diagnostics."""

from dataclasses import replace

import pytest

from hashcl.parser import parse
from hashcl.wellformed import check_concrete, check_wellformed

from conftest import CORPUS

MATVEC = (CORPUS / "matvec" / "MatVecProduct.hcl").read_text()


def codes(diags):
    return [d.code for d in diags]


def drop_slice(cfg, slice_id):
    unit = cfg.units[0]
    slices = tuple(s for s in unit.slices if s.slice_id != slice_id)
    return replace(cfg, units=(replace(unit, slices=slices),) + cfg.units[1:])


def duplicate_slice(cfg, slice_id):
    unit = cfg.units[0]
    twin = next(s for s in unit.slices if s.slice_id == slice_id)
    clone = replace(twin, slice_id=twin.slice_id + "_again")
    return replace(cfg, units=(replace(unit, slices=unit.slices + (clone,)),) + cfg.units[1:])


class TestExactlyOnce:
    def test_corpus_config_is_clean(self, matvec_reg):
        cfg = parse(MATVEC)
        assert check_wellformed(cfg, matvec_reg) == []

    def test_deleting_a_slice_is_detected(self, matvec_reg):
        cfg = drop_slice(parse(MATVEC), "vslice")
        diags = check_wellformed(cfg, matvec_reg)
        assert codes(diags) == ["UnslicedInnerUnit"]
        assert diags[0].subject == "v.vector"

    def test_duplicating_a_slice_target_is_detected(self, matvec_reg):
        cfg = duplicate_slice(parse(MATVEC), "aslice")
        diags = check_wellformed(cfg, matvec_reg)
        assert codes(diags) == ["DuplicateSliceTarget"]
        assert diags[0].subject == "a.matrix"

    @pytest.mark.parametrize("slice_id,subject", [("aslice", "a.matrix"), ("xslice", "x.vector"), ("vslice", "v.vector")])
    def test_every_deletion_mutant_flips(self, matvec_reg, slice_id, subject):
        diags = check_wellformed(drop_slice(parse(MATVEC), slice_id), matvec_reg)
        assert codes(diags) == ["UnslicedInnerUnit"] and diags[0].subject == subject

    @pytest.mark.parametrize("slice_id", ["aslice", "xslice", "vslice"])
    def test_every_duplication_mutant_flips(self, matvec_reg, slice_id):
        diags = check_wellformed(duplicate_slice(parse(MATVEC), slice_id), matvec_reg)
        assert codes(diags) == ["DuplicateSliceTarget"]


class TestOtherDiagnostics:
    def test_unknown_configuration(self, matvec_reg):
        cfg = parse("computation X begin data a : Ghost unit u begin slice s from a.item end end")
        assert "UnknownConfig" in codes(check_wellformed(cfg, matvec_reg))

    def test_unknown_slice_target(self, matvec_reg):
        cfg = parse(
            "computation X begin data a : Number unit u begin slice s from a.ghost end end"
        )
        diags = check_wellformed(cfg, matvec_reg)
        assert "UnknownSliceTarget" in codes(diags)
        # the bad slice does not count as folding; the real unit is unsliced
        assert "UnslicedInnerUnit" in codes(diags)

    def test_undeclared_inner_in_slice(self, matvec_reg):
        cfg = parse(
            "computation X begin data a : Number unit u begin slice s from a.number slice t from ghost.item end end"
        )
        assert "UnknownInner" in codes(check_wellformed(cfg, matvec_reg))

    def test_supply_arity(self, matvec_oo_reg):
        src = """
        computation X [C: Cluster, E: Environment[C], N: Number, D: VecPartition]
        begin
          environment env : E
          environment env2 : E
          data a : ParData[C, E, Matrix[N], D] (env, env2)
          unit u
          begin
            slice e from env.node
            slice e2 from env2.node
            slice s from a.parData
          end
        end
        """
        assert "SupplyArityMismatch" in codes(check_wellformed(parse(src), matvec_oo_reg))

    def test_supply_kind_mismatch(self, matvec_oo_reg):
        src = """
        computation X [C: Cluster, E: Environment[C], N: Number, D: VecPartition]
        begin
          qualifier q : D
          data a : ParData[C, E, Matrix[N], D] (q)
          unit u
          begin
            slice qs from q.vecPartition
            slice s from a.parData
          end
        end
        """
        assert "SupplyKindMismatch" in codes(check_wellformed(parse(src), matvec_oo_reg))

    def test_supply_names_undeclared_inner(self, matvec_oo_reg):
        src = """
        computation X [C: Cluster, E: Environment[C], N: Number, D: VecPartition]
        begin
          data a : ParData[C, E, Matrix[N], D] (ghost)
          unit u
          begin
            slice s from a.parData
          end
        end
        """
        assert "InvalidSupplyRef" in codes(check_wellformed(parse(src), matvec_oo_reg))


class TestConcreteChecks:
    def test_clean_implementation(self, channels_reg):
        cfg = parse((CORPUS / "channels" / "ChannelImpl4.hcl").read_text())
        assert check_concrete(cfg, channels_reg) == []

    def test_unit_names_must_match(self, channels_reg):
        src = (
            "synchronizer Odd [E: MPIBasic, D: Data] implements Channel[E, D] "
            "version 1.0.0.0 begin unit send unit receive end"
        )
        diags = check_concrete(parse(src), channels_reg)
        assert "UnitNamesMismatch" in codes(diags)

    def test_bound_violation_reported(self, channels_reg):
        src = (
            "synchronizer Bad [E: Vector, D: Data] implements Channel[E, D] "
            "version 1.0.0.0 begin unit send unit recv end"
        )
        assert "BoundViolation" in codes(check_concrete(parse(src), channels_reg))
