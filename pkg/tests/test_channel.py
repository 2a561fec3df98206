"""Channel model, interval estimates, decoder spec parsing, and the
Monte Carlo harness: determinism, stop rules, worker invariance."""

import io

import numpy as np
import pytest

from polaraut.channel import (
    CSV_COLUMNS,
    ChannelParams,
    DecoderSpec,
    SimResult,
    default_code_id,
    run_bler,
    transmit,
    wilson_interval,
    write_results_csv,
)
from polaraut.construction import bhattacharyya_bec_design
from polaraut.monomials import Monomial, decreasing_closure


def small_code():
    return decreasing_closure(
        [Monomial.from_indices([0, 3]), Monomial.from_indices([1, 2])], 5
    )


class TestChannelParams:
    def test_noise_variance_formula(self):
        # At Eb/N0 = 0 dB and rate 1/2 the variance is exactly 1.
        params = ChannelParams(ebn0_db=0.0, rate=0.5)
        assert params.noise_variance == pytest.approx(1.0)
        # 10 * log10(1/(2 R sigma^2)) recovers the operating point.
        params = ChannelParams(ebn0_db=2.5, rate=0.25)
        back = 10.0 * np.log10(1.0 / (2.0 * 0.25 * params.noise_variance))
        assert back == pytest.approx(2.5)

    def test_rate_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(ebn0_db=1.0, rate=0.0)
        with pytest.raises(ValueError):
            ChannelParams(ebn0_db=1.0, rate=1.5)


class TestTransmit:
    def test_llr_signs_at_high_snr(self):
        params = ChannelParams(ebn0_db=20.0, rate=0.5)
        bits = np.array([0, 1, 0, 1, 1, 0, 0, 1], dtype=np.uint8)
        llrs = transmit(bits, params, np.random.default_rng(1))
        assert np.array_equal(llrs < 0, bits.astype(bool))

    def test_moments_match_the_model(self):
        # y = (1 - 2c) + noise; for the all-zero word, mean 1, variance sigma^2.
        params = ChannelParams(ebn0_db=0.0, rate=0.5)
        sigma2 = params.noise_variance
        count = 1_000_000
        bits = np.zeros(count, dtype=np.uint8)
        llrs = transmit(bits, params, np.random.default_rng(2))
        y = llrs * sigma2 / 2.0
        se_mean = np.sqrt(sigma2 / count)
        assert abs(float(y.mean()) - 1.0) < 3.0 * se_mean
        se_var = sigma2 * np.sqrt(2.0 / count)
        assert abs(float(y.var()) - sigma2) < 3.0 * se_var

    def test_deterministic_replay(self):
        params = ChannelParams(ebn0_db=3.0, rate=0.5)
        bits = np.array([1, 0, 1, 0], dtype=np.uint8)
        a = transmit(bits, params, np.random.default_rng(7))
        b = transmit(bits, params, np.random.default_rng(7))
        assert np.array_equal(a, b)


class TestWilsonInterval:
    def test_frozen_values(self):
        lo, hi = wilson_interval(5, 100)
        assert lo == pytest.approx(0.02154367915436796)
        assert hi == pytest.approx(0.11175046923191913)
        lo, hi = wilson_interval(0, 100)
        assert lo == pytest.approx(0.0, abs=1e-12)
        assert hi == pytest.approx(0.03699349820698568)
        lo, hi = wilson_interval(100, 100)
        assert lo == pytest.approx(0.9630065017930143)
        assert hi == pytest.approx(1.0)

    def test_contains_point_estimate(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            trials = int(rng.integers(1, 10_000))
            errors = int(rng.integers(0, trials + 1))
            lo, hi = wilson_interval(errors, trials)
            assert 0.0 <= lo <= errors / trials <= hi <= 1.0

    def test_symmetry(self):
        lo, hi = wilson_interval(13, 64)
        flo, fhi = wilson_interval(64 - 13, 64)
        assert lo == pytest.approx(1.0 - fhi)
        assert hi == pytest.approx(1.0 - flo)

    def test_validation(self):
        with pytest.raises(ValueError):
            wilson_interval(1, 0)
        with pytest.raises(ValueError):
            wilson_interval(5, 4)


class TestDecoderSpec:
    def test_parse_forms(self):
        assert DecoderSpec.parse("sc").kind == "sc"
        scl = DecoderSpec.parse("scl-8")
        assert (scl.kind, scl.list_size) == ("scl", 8)
        aut = DecoderSpec.parse("aut-4-sc")
        assert (aut.kind, aut.ensemble_size, aut.lta_only) == ("aut_sc", 4, False)
        lta = DecoderSpec.parse("AUT-8-SC-LTA")
        assert (lta.kind, lta.ensemble_size, lta.lta_only) == ("aut_sc", 8, True)

    def test_label_preserved(self):
        assert DecoderSpec.parse("scl-32").label == "scl-32"

    @pytest.mark.parametrize(
        "text", ["", "scl", "scl-0", "aut-sc", "aut-0-sc", "sc-8", "ml", "scl-2-lta"]
    )
    def test_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            DecoderSpec.parse(text)


class TestSimResult:
    def test_derived_fields(self):
        r = SimResult("c", "sc", 1.0, frames=200, block_errors=10, seed=4)
        assert r.bler == pytest.approx(0.05)
        assert r.ci95 == wilson_interval(10, 200)

    def test_validation(self):
        with pytest.raises(ValueError):
            SimResult("c", "sc", 1.0, frames=10, block_errors=11, seed=0)


def test_default_code_id():
    code = decreasing_closure([Monomial.from_indices([0, 1, 2])], 4)
    assert default_code_id(code) == "N16_K8_gen8"


class TestRunBler:
    def test_deterministic_replay(self):
        code = small_code()
        kwargs = dict(master_seed=11, target_errors=40, max_frames=4000)
        a = run_bler(code, "sc", [1.0, 3.0], **kwargs)
        b = run_bler(code, "sc", [1.0, 3.0], **kwargs)
        assert [(r.frames, r.block_errors) for r in a] == [
            (r.frames, r.block_errors) for r in b
        ]

    def test_worker_count_does_not_change_counts(self):
        code = small_code()
        kwargs = dict(master_seed=12, target_errors=60, max_frames=6000)
        solo = run_bler(code, "scl-2", [2.0], workers=1, **kwargs)
        duo = run_bler(code, "scl-2", [2.0], workers=2, **kwargs)
        assert (solo[0].frames, solo[0].block_errors) == (
            duo[0].frames,
            duo[0].block_errors,
        )

    def test_seed_changes_the_outcome(self):
        code = small_code()
        a = run_bler(code, "sc", [2.0], master_seed=1, target_errors=50, max_frames=5000)
        b = run_bler(code, "sc", [2.0], master_seed=2, target_errors=50, max_frames=5000)
        assert (a[0].frames, a[0].block_errors) != (b[0].frames, b[0].block_errors)

    def test_stop_rules(self):
        code = small_code()
        capped = run_bler(
            code, "sc", [0.0], master_seed=13, target_errors=None, max_frames=700
        )
        assert capped[0].frames == 700
        early = run_bler(
            code, "sc", [0.0], master_seed=13, target_errors=25, max_frames=100_000
        )
        assert early[0].block_errors >= 25
        assert early[0].frames < 100_000

    def test_zero_max_frames_rejected(self):
        with pytest.raises(ValueError):
            run_bler(small_code(), "sc", [1.0], master_seed=0, max_frames=0)

    def test_invalid_decoder_rejected(self):
        with pytest.raises(ValueError):
            run_bler(small_code(), "turbo", [1.0], master_seed=0)

    def test_empty_snr_list_rejected(self):
        with pytest.raises(ValueError):
            run_bler(small_code(), "sc", [], master_seed=0)

    def test_result_fields(self):
        code = small_code()
        results = run_bler(
            code, "aut-2-sc", [1.0, 2.5], master_seed=14, target_errors=20,
            max_frames=3000, code_id="demo",
        )
        assert [r.ebn0_db for r in results] == [1.0, 2.5]
        for r in results:
            assert r.code_id == "demo"
            assert r.decoder == "aut-2-sc"
            assert r.seed == 14
            assert 0 <= r.block_errors <= r.frames
            lo, hi = r.ci95
            assert 0.0 <= lo <= r.bler <= hi <= 1.0

    def test_bler_monotone_in_snr_up_to_ci_overlap(self):
        code = bhattacharyya_bec_design(0.285, 16, 5)
        results = run_bler(
            code, "sc", [0.0, 2.0, 4.0], master_seed=15,
            target_errors=150, max_frames=30_000,
        )
        for a, b in zip(results, results[1:]):
            overlap = a.ci95[0] <= b.ci95[1] and b.ci95[0] <= a.ci95[1]
            assert b.bler <= a.bler or overlap

    def test_all_decoder_kinds_run(self):
        code = small_code()
        for name in ("sc", "scl-4", "aut-4-sc", "aut-4-sc-lta"):
            results = run_bler(
                code, name, [4.0], master_seed=16, target_errors=10, max_frames=400
            )
            assert results[0].decoder == name

    def test_fixed_ensemble_replay(self):
        code = small_code()
        kwargs = dict(master_seed=17, target_errors=30, max_frames=3000)
        a = run_bler(code, "aut-4-sc", [2.0], fixed_ensemble=True, **kwargs)
        b = run_bler(code, "aut-4-sc", [2.0], fixed_ensemble=True, **kwargs)
        assert (a[0].frames, a[0].block_errors) == (b[0].frames, b[0].block_errors)

    def test_min_sum_kernel_accepted(self):
        results = run_bler(
            small_code(), "sc", [3.0], master_seed=18, target_errors=10,
            max_frames=400, kernel="min_sum",
        )
        assert results[0].frames >= 1


def test_write_results_csv():
    r = SimResult("cid", "sc", 1.5, frames=100, block_errors=7, seed=3)
    buf = io.StringIO()
    write_results_csv([r], buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    cells = lines[1].split(",")
    assert cells[0] == "cid"
    assert cells[1] == "sc"
    assert float(cells[2]) == 1.5
    assert int(cells[3]) == 100
    assert int(cells[4]) == 7
    assert float(cells[5]) == pytest.approx(0.07)
    lo, hi = wilson_interval(7, 100)
    assert float(cells[6]) == pytest.approx(lo)
    assert float(cells[7]) == pytest.approx(hi)
    assert int(cells[8]) == 3
