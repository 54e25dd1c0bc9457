"""Chain certificates: verification, serialization, search, transports."""

import pytest

from redhom.algebra import build_algebra
from redhom.linalg import GF2, QQ, Matrix
from redhom.modules import (
    ModuleMap,
    free_module,
    power_module,
    residue_field,
    split_free_summands,
    from_presentation,
    is_isomorphic,
)
from redhom.resolution import resolve, syzygy
from redhom.reducing import (
    CertificateError,
    CertificateFormatError,
    ReducingSequence,
    SearchConfig,
    load_certificate,
    omega_of_map,
    save_certificate,
    search,
    sequence_from_dict,
    sequence_to_dict,
    transform_cosyzygy,
    transform_syzygy,
    verify,
)

@pytest.fixture(scope="module")
def plane():
    return build_algebra(GF2, ["x", "y"], [], 2)


@pytest.fixture(scope="module")
def line2():
    return build_algebra(GF2, ["x"], [], 2)


@pytest.fixture(scope="module")
def line3():
    return build_algebra(GF2, ["x"], [], 3)


def pd_cert_for_k(plane):
    cfg = SearchConfig(max_r=1, max_a=4, max_b=1, max_n=2)
    result = search(residue_field(plane), "pd", cfg)
    assert result.found
    return result.sequence


def mod_rx(alg):
    # quotient by the first variable: one generator, relation x*gen
    return from_presentation(alg, 1, [["x"]], label="R/x")


class TestVerify:
    def test_trivial_chain_on_free_module(self, plane):
        seq = ReducingSequence(free_module(plane, 2), [], "pd")
        report = verify(seq)
        assert report.ok
        assert report.terminal == {"kind": "free", "dim": 6}

    def test_trivial_chain_on_k_rejected(self, plane):
        seq = ReducingSequence(residue_field(plane), [], "pd")
        report = verify(seq)
        assert not report.ok
        assert "not free" in report.reason

    def test_flagship_certificate(self, plane):
        seq = pd_cert_for_k(plane)
        assert seq.r == 1
        step = seq.steps[0]
        assert (step.a, step.b, step.n) == (4, 1, 1)
        assert step.sequence.middle.free_rank == 2
        assert verify(seq).ok

    def test_corrupted_witness_rejected(self, plane):
        seq = pd_cert_for_k(plane)
        step = seq.steps[0]
        bad = step.witness.matrix + Matrix.identity(GF2,
                                                    step.witness.matrix.rows)
        step.witness = ModuleMap(step.witness.source, step.witness.target,
                                 bad, validate=False)
        report = verify(seq)
        assert not report.ok
        assert report.step == 1
        assert "witness" in report.reason

    def test_corrupted_project_rejected(self, plane):
        seq = pd_cert_for_k(plane)
        step = seq.steps[0]
        bad = Matrix.zeros(GF2, step.sequence.project.matrix.rows,
                           step.sequence.project.matrix.cols)
        step.sequence.project = ModuleMap(
            step.sequence.middle, step.sequence.right, bad, validate=False)
        report = verify(seq)
        assert not report.ok
        assert report.step == 1
        assert "exact" in report.reason

    def test_wrong_left_power_rejected(self, plane):
        seq = pd_cert_for_k(plane)
        seq.steps[0].a = 2  # the stored sequence still has a 4-fold left
        report = verify(seq)
        assert not report.ok
        assert "power" in report.reason

    def test_gdim_terminal_over_gorenstein(self, line3):
        seq = ReducingSequence(mod_rx(line3), [], "gdim")
        report = verify(seq)
        assert report.ok
        assert report.terminal["kind"] == "totally_reflexive"
        assert report.terminal["certified"]


class TestSerialization:
    def test_roundtrip(self, plane):
        seq = pd_cert_for_k(plane)
        data = sequence_to_dict(seq)
        back = sequence_from_dict(data)
        assert verify(back).ok
        assert sequence_to_dict(back) == data

    def test_roundtrip_with_workspace_algebra(self, plane):
        seq = pd_cert_for_k(plane)
        back = sequence_from_dict(sequence_to_dict(seq), algebra=plane)
        assert back.base.algebra is plane
        assert verify(back).ok

    def test_save_load(self, plane, tmp_path):
        seq = pd_cert_for_k(plane)
        path = tmp_path / "cert.json"
        save_certificate(seq, path)
        back = load_certificate(path)
        assert verify(back).ok

    def test_rational_chain_roundtrip(self):
        alg = build_algebra(QQ, ["x"], [], 3)
        result = search(mod_rx(alg), "pd", SearchConfig(max_r=1, max_a=2,
                                                        max_b=2, max_n=2))
        assert result.found
        back = sequence_from_dict(sequence_to_dict(result.sequence))
        assert verify(back).ok

    @pytest.mark.parametrize("mutate,pointer", [
        (lambda d: d.update(format="bogus/9"), "/format"),
        (lambda d: d.update(target="both"), "/target"),
        (lambda d: d.update(algebra=[1, 2]), "/algebra"),
        (lambda d: d["base"].update(dim=-1), "/base/dim"),
        (lambda d: d["base"]["actions"].pop(), "/base/actions"),
        (lambda d: d["steps"][0].update(a=0), "/steps/0/a"),
        (lambda d: d["steps"][0]["witness"].pop(), "/steps/0/witness"),
        (lambda d: d["steps"][0]["inject"][0].pop(), "/steps/0/inject/0"),
    ])
    def test_format_errors_carry_pointers(self, plane, mutate, pointer):
        data = sequence_to_dict(pd_cert_for_k(plane))
        mutate(data)
        with pytest.raises(CertificateFormatError) as err:
            sequence_from_dict(data)
        assert err.value.pointer == pointer

    def test_algebra_mismatch_rejected(self, plane, line3):
        data = sequence_to_dict(pd_cert_for_k(plane))
        with pytest.raises(CertificateFormatError) as err:
            sequence_from_dict(data, algebra=line3)
        assert err.value.pointer == "/algebra"


class TestSearch:
    def test_flagship_found_via_free_middle(self, plane):
        result = search(residue_field(plane), "pd",
                        SearchConfig(max_r=1, max_a=4, max_b=1, max_n=2))
        assert result.found and not result.exhausted
        assert result.candidates == 0  # free-middle construction is free

    def test_square_zero_three_variables(self):
        alg = build_algebra(GF2, ["x", "y", "z"], [], 2)
        result = search(residue_field(alg), "pd",
                        SearchConfig(max_r=1, max_a=9, max_b=1, max_n=1))
        assert result.found
        step = result.sequence.steps[0]
        assert (step.a, step.b, step.n) == (9, 1, 1)

    def test_structureless_module_absent(self, plane):
        result = search(mod_rx(plane), "pd",
                        SearchConfig(max_r=2, max_a=4, max_b=2, max_n=2,
                                     budget=60))
        assert not result.found
        assert result.reason in ("no certificate within bounds",
                                 "candidate budget exhausted")

    def test_budget_exhaustion_flagged(self, plane):
        result = search(mod_rx(plane), "pd",
                        SearchConfig(max_r=2, max_a=4, max_b=2, max_n=2,
                                     budget=2))
        assert not result.found
        assert result.exhausted
        assert result.candidates == 2

    def test_gorenstein_gdim_is_immediate(self, line3):
        result = search(mod_rx(line3), "gdim")
        assert result.found
        assert result.sequence.r == 0

    def test_periodic_module_over_line3(self, line3):
        result = search(mod_rx(line3), "pd",
                        SearchConfig(max_r=1, max_a=2, max_b=2, max_n=2))
        assert result.found
        step = result.sequence.steps[0]
        assert (step.a, step.b, step.n) == (1, 1, 1)
        assert step.sequence.middle.free_rank == 1

    def test_deterministic(self, plane):
        cfg = SearchConfig(max_r=1, max_a=2, max_b=2, max_n=1, budget=30,
                           seed=7)
        r1 = search(mod_rx(plane), "gdim", cfg)
        r2 = search(mod_rx(plane), "gdim", cfg)
        assert r1.found == r2.found
        assert r1.candidates == r2.candidates


class TestOmegaOfMap:
    def test_identity_transports_to_isomorphism(self, line3):
        m = mod_rx(line3)
        out = omega_of_map(ModuleMap.identity(m), steps=2)
        assert out.is_isomorphism()
        assert out.source.dim == syzygy(m, 2).dim

    def test_iso_transport_matches_syzygy_dims(self, plane):
        k = residue_field(plane)
        k2 = power_module(k, 2)
        omega = syzygy(k, 1)
        ver = is_isomorphic(k2, omega)
        assert ver.kind == "yes"
        out = omega_of_map(ver.witness)
        assert out.is_isomorphism()
        assert out.source is syzygy(k2, 1)
        assert out.target is syzygy(omega, 1)


class TestTransformSyzygy:
    def test_trivial_chain(self, plane):
        seq = ReducingSequence(free_module(plane, 3), [], "pd")
        out = transform_syzygy(seq)
        assert out.base.dim == 0
        assert verify(out).ok

    def test_line3_chain(self, line3):
        seq = search(mod_rx(line3), "pd",
                     SearchConfig(max_r=1, max_a=2, max_b=2, max_n=2)
                     ).sequence
        out = transform_syzygy(seq)
        assert verify(out).ok
        assert out.r == 1
        step = out.steps[0]
        assert (step.a, step.b, step.n) == (1, 1, 1)
        assert out.base.dim == syzygy(mod_rx(line3), 1).dim
        # middle is syz(R) + one free pad = 0 + R
        assert step.sequence.middle.dim == line3.dim

    def test_flagship_chain(self, plane):
        seq = pd_cert_for_k(plane)
        out = transform_syzygy(seq)
        assert verify(out).ok
        step = out.steps[0]
        # syzygy of a free middle vanishes, leaving pure padding
        peel = split_free_summands(step.sequence.middle)
        assert peel.remainder.dim == 0
        assert step.sequence.middle.dim == 4 * plane.dim

    def test_rejects_bad_input(self, plane):
        seq = ReducingSequence(residue_field(plane), [], "pd")
        with pytest.raises(CertificateError):
            transform_syzygy(seq)


class TestTransformCosyzygy:
    def test_ext_precondition_rejection(self, plane):
        # chain base is k = syz(R/x); Ext^1(k, ring) is nonzero, so the
        # transport must refuse rather than attempt the construction
        seq = pd_cert_for_k(plane)
        outcome = transform_cosyzygy(seq, mod_rx(plane), window=4)
        assert not outcome.ok
        assert "Ext" in outcome.reason

    def test_base_identification_rejection(self, line3):
        seq = ReducingSequence(free_module(line3, 1), [], "pd")
        outcome = transform_cosyzygy(seq, mod_rx(line3), window=4)
        assert not outcome.ok
        assert "base" in outcome.reason

    def test_window_guard(self, line3):
        seq = transform_syzygy(
            search(mod_rx(line3), "pd",
                   SearchConfig(max_r=1, max_a=2, max_b=2, max_n=2)
                   ).sequence)
        outcome = transform_cosyzygy(seq, mod_rx(line3), window=2)
        assert not outcome.ok
        assert "window" in outcome.reason

    def test_roundtrip_line3(self, line3):
        m = mod_rx(line3)
        seq = search(m, "pd",
                     SearchConfig(max_r=1, max_a=2, max_b=2, max_n=2)
                     ).sequence
        shifted = transform_syzygy(seq)
        assert verify(shifted).ok
        outcome = transform_cosyzygy(shifted, m, window=5)
        assert outcome.ok, outcome.reason
        back = outcome.sequence
        assert back.base is m
        assert verify(back).ok
        assert back.r == seq.r
        step = back.steps[0]
        assert (step.a, step.b, step.n) == (1, 1, 1)

    def test_roundtrip_trivial(self, line2):
        k = residue_field(line2)
        seq = search(k, "gdim").sequence  # r = 0, Gorenstein
        shifted = transform_syzygy(seq)
        outcome = transform_cosyzygy(shifted, k, window=4)
        assert outcome.ok, outcome.reason
        assert outcome.sequence.r == 0
