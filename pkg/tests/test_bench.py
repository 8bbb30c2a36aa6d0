from __future__ import annotations

import pytest

from acshare.bench import (
    BenchRow,
    HEADER,
    UndefinedRateError,
    expected_memory_bytes,
    genuine_detection_rate,
    measure_memory,
    render_csv,
    run_sweep,
    write_csv,
)
from acshare.entities import run_protocol
from acshare.netsim import (
    KEY_LENGTH_BITS,
    AdversaryClass,
    AdversarySpec,
    ScenarioConfig,
    summarize,
)

MIXED = tuple(
    AdversarySpec(cls=cls, count=1)
    for cls in (
        AdversaryClass.WRONG_PASSWORD,
        AdversaryClass.FORGED_PRIVATE_KEY,
        AdversaryClass.TAMPER_VALIDATION,
        AdversaryClass.TAMPER_CIPHERTEXT,
        AdversaryClass.REPLAY_QUERY,
    )
)


def config_for(bits, adversaries=(), n_genuine=1, seed=0):
    return ScenarioConfig(
        n_genuine=n_genuine,
        adversaries=adversaries,
        dataset="sample",
        key_length_bits=bits,
        seed=seed,
    )


class TestRate:
    def test_honest_rate_is_one(self, honest_transcript, honest_config):
        summary = summarize(honest_transcript, honest_config)
        assert genuine_detection_rate(summary) == 1.0

    def test_zero_genuine_is_undefined(self, sample_payload):
        config = config_for(128, n_genuine=0)
        transcript = run_protocol(config, [sample_payload])
        summary = summarize(transcript, config)
        with pytest.raises(UndefinedRateError):
            genuine_detection_rate(summary)


class TestMemoryAccounting:
    @pytest.mark.parametrize("bits", KEY_LENGTH_BITS)
    def test_closed_form_matches_measurement(self, bits, sample_payload):
        payloads = [sample_payload, b"short", b"x" * 200]
        config = config_for(bits, adversaries=MIXED, n_genuine=2, seed=3)
        transcript = run_protocol(config, payloads)
        measured = measure_memory(config, transcript)
        predicted = expected_memory_bytes(config, [len(p) for p in payloads])
        assert measured == predicted

    @pytest.mark.parametrize("bits", KEY_LENGTH_BITS)
    def test_matches_store_plus_centre(self, bits, sample_payload):
        config = config_for(bits, seed=9)
        transcript = run_protocol(config, [sample_payload])
        store_bytes = transcript.world.cloud.store.accounted_bytes()
        assert measure_memory(config, transcript) == store_bytes + 2 * (bits // 8)

    def test_strictly_increasing_in_key_length(self, sample_payload):
        sizes = []
        for bits in KEY_LENGTH_BITS:
            config = config_for(bits, seed=1)
            transcript = run_protocol(config, [sample_payload])
            sizes.append(measure_memory(config, transcript))
        assert all(a < b for a, b in zip(sizes, sizes[1:]))

    def test_replaying_outsider_stores_nothing(self, sample_payload):
        replay = tuple([AdversarySpec(cls=AdversaryClass.REPLAY_QUERY, count=3)])
        with_replay = config_for(128, adversaries=replay, seed=2)
        without = config_for(128, seed=2)
        mem_with = measure_memory(with_replay, run_protocol(with_replay, [sample_payload]))
        mem_without = measure_memory(without, run_protocol(without, [sample_payload]))
        assert mem_with == mem_without

    def test_session_grants_overwrite_not_accumulate(self, sample_payload):
        replay = tuple([AdversarySpec(cls=AdversaryClass.REPLAY_QUERY, count=1)])
        config = config_for(128, adversaries=replay, seed=2)
        transcript = run_protocol(config, [sample_payload])
        # two SESSION_STORE messages, one stored key
        assert len(transcript.by_kind("SESSION_STORE")) == 2
        predicted = expected_memory_bytes(config, [len(sample_payload)])
        assert measure_memory(config, transcript) == predicted


class TestSweep:
    def test_row_grid_and_order(self, data_dir):
        rows = run_sweep(
            ["swiss"], key_lengths=(64, 128), seeds=(0, 1), data_dir=data_dir, max_records=3
        )
        grid = [(r.dataset, r.key_length_bits, r.seed) for r in rows]
        assert grid == [
            ("swiss", 64, 0),
            ("swiss", 64, 1),
            ("swiss", 128, 0),
            ("swiss", 128, 1),
        ]
        assert all(r.genuine_detection_rate == 1.0 for r in rows)

    def test_csv_format(self, tmp_path):
        rows = [
            BenchRow("swiss", 64, 12345, 1.0, 0),
            BenchRow("swiss", 128, 23456, 0.9153, 7),
        ]
        text = render_csv(rows)
        lines = text.splitlines()
        assert lines[0] == HEADER
        assert lines[1] == "swiss,64,12345,1.0000,0"
        assert lines[2] == "swiss,128,23456,0.9153,7"
        out = tmp_path / "bench.csv"
        write_csv(rows, out)
        raw = out.read_bytes()
        assert raw.endswith(b"\n")
        assert b"\r" not in raw

    def test_sweep_is_deterministic(self, data_dir):
        first = run_sweep(["swiss"], key_lengths=(64,), data_dir=data_dir, max_records=2)
        second = run_sweep(["swiss"], key_lengths=(64,), data_dir=data_dir, max_records=2)
        assert render_csv(first) == render_csv(second)
