"""Smoke tests for the python module: each exposed operation runs end to end
and returns what the C++ suites verify in depth."""

import hashlib

import pytest

import wban


def test_hash160_matches_hashlib():
    for payload in (b"", b"abc", b"wban" * 33):
        assert wban.hash160(payload) == hashlib.sha1(payload).digest()


def test_derive_key_truncates():
    digest = wban.hash160(b"abc")
    assert wban.derive_key(digest) == digest[:16]
    with pytest.raises(ValueError):
        wban.derive_key(b"short")


def test_cipher_round_trip_and_padding():
    key = bytes(range(16))
    plaintext = b"exactly-seventeen"  # 17 bytes -> 2 blocks
    ct = wban.encrypt(key, plaintext)
    assert len(ct) == 32
    assert wban.decrypt(key, ct)[: len(plaintext)] == plaintext
    assert wban.decrypt(bytes(16), ct)[: len(plaintext)] != plaintext


def test_wire_sizes_are_the_published_constants():
    sizes = wban.wire_sizes()
    assert sizes["auth_request"] == 672
    assert sizes["gateway_to_mobile"] == 288
    assert sizes["mobile_to_sensor"] == 288
    assert sizes["sensor_to_expert"] == 160
    assert sizes["total"] == 1408
    assert wban.wire_size_bits("auth-request") == 672


def test_honest_handshake_agrees_on_keys():
    report = wban.run_handshake(seed=7, experts=1, patients=1, sensors=2)
    assert report["established"] == 2
    for handshake in report["handshakes"]:
        assert handshake["key_established"]
        assert handshake["expert_key"] == handshake["sensor_key"]


def test_handshake_records_are_deterministic():
    a = wban.handshake_jsonl(seed=42, repetitions=2)
    b = wban.handshake_jsonl(seed=42, repetitions=2)
    assert a == b
    assert a != wban.handshake_jsonl(seed=43, repetitions=2)


def test_replay_is_rejected():
    report = wban.run_attack("replay", target="sensor-to-expert", delay=10, seed=3)
    assert report["attack_injections"] == 1
    assert report["attack_acceptances"] == 0
    assert report["handshakes"][0]["reason"] == "window_exceeded"


def test_tamper_is_rejected():
    report = wban.run_attack("tamper", target="auth-request", bit=0, seed=4)
    assert report["attack_acceptances"] == 0
    assert report["established"] == 0


def test_compromised_mobile_confinement():
    report = wban.run_attack("compromised-mobile", seed=5)
    closure = report["closure"]
    assert not closure["contains_m_id"]
    assert not closure["contains_m"]
    assert not closure["contains_kssk"]
    assert closure["inversion_recovers_m_id"]
    assert closure["inversion_recovers_m"]
    assert closure["relay_probe_rejected"]
    assert closure["relay_probe_reason"] == "no_pending_handshake"


def test_costs_reproduce_the_tables():
    tables = wban.costs()
    assert tables["medical_expert"] == {"hash_ops": 4, "enc_or_dec_ops": 2, "xor_ops": 5}
    assert tables["gateway"] == {"hash_ops": 1, "enc_or_dec_ops": 4, "xor_ops": 0}
    assert tables["mobile_device"] == {"hash_ops": 0, "enc_or_dec_ops": 2, "xor_ops": 0}
    assert tables["sensor"] == {"hash_ops": 1, "enc_or_dec_ops": 3, "xor_ops": 2}
    assert tables["total"] == {"hash_ops": 6, "enc_or_dec_ops": 11, "xor_ops": 7}
    assert tables["per_hop_bits"] == [672, 288, 288, 160]
    assert tables["total_bits"] == 1408


def test_ban_goals_and_ablation():
    result = wban.ban_verify()
    assert result["all_goals_derived"]
    assert not result["inconclusive"]
    assert all(goal["derived"] for goal in result["goals"].values())

    without_p18 = wban.ban_verify(drop=["P18"])
    assert not without_p18["goals"]["G3"]["derived"]
    assert without_p18["goals"]["G1"]["derived"]

    assert "sessionkey K_ssk" in wban.ban_case_study_source()


def test_measure_reports_positive_traffic():
    result = wban.measure(sensors=3, packets=4, seed=6)
    assert result["packets_received"] == 12
    assert result["throughput_bytes_per_s"] > 0
    assert result["eed_seconds"] > 0
