"""Gas model: hand-computed oracles and the storage/log tradeoff."""

import pytest

from agritrace.errors import GasError
from agritrace.ledger import DEFAULT_GAS_SCHEDULE, GasSchedule, estimate_gas

# Hand recomputation for a 200-byte payload under the default schedule:
#   persistent: 21000 + 200*16 + ceil(200/32)*20000 = 21000 + 3200 + 140000
#   log:        21000 + 200*16 + 375 + 375 + 200*8  = 21000 + 3200 + 2350
PERSISTENT_200 = 164200
LOG_200 = 26550


def test_persistent_200_bytes_matches_hand_computation():
    assert estimate_gas(DEFAULT_GAS_SCHEDULE, 200, "persistent") == PERSISTENT_200


def test_log_200_bytes_matches_hand_computation():
    assert estimate_gas(DEFAULT_GAS_SCHEDULE, 200, "log") == LOG_200


def test_empty_payload_log_cost():
    # 21000 + 375 + 375, no calldata, no data bytes
    assert estimate_gas(DEFAULT_GAS_SCHEDULE, 0, "log") == 21750


def test_log_cheaper_than_persistent_from_one_slot_up():
    for size in range(32, 2048):
        log = estimate_gas(DEFAULT_GAS_SCHEDULE, size, "log")
        persistent = estimate_gas(DEFAULT_GAS_SCHEDULE, size, "persistent")
        assert log < persistent


def test_ratio_at_most_quarter_for_payloads_of_160_bytes_and_up():
    for size in range(160, 4096):
        log = estimate_gas(DEFAULT_GAS_SCHEDULE, size, "log")
        persistent = estimate_gas(DEFAULT_GAS_SCHEDULE, size, "persistent")
        assert log * 4 <= persistent, f"ratio above 1/4 at {size} bytes"


def test_updated_slots_add_update_cost():
    base = estimate_gas(DEFAULT_GAS_SCHEDULE, 64, "persistent")
    with_updates = estimate_gas(DEFAULT_GAS_SCHEDULE, 64, "persistent", updated_slots=3)
    assert with_updates == base + 3 * DEFAULT_GAS_SCHEDULE.storage_update_cost


def test_extra_topics_add_topic_cost():
    one = estimate_gas(DEFAULT_GAS_SCHEDULE, 64, "log", topics=1)
    three = estimate_gas(DEFAULT_GAS_SCHEDULE, 64, "log", topics=3)
    assert three == one + 2 * DEFAULT_GAS_SCHEDULE.log_topic_cost


def test_unknown_mode_rejected():
    with pytest.raises(GasError):
        estimate_gas(DEFAULT_GAS_SCHEDULE, 10, "papyrus")


def test_negative_payload_rejected():
    with pytest.raises(GasError):
        estimate_gas(DEFAULT_GAS_SCHEDULE, -1, "log")


def test_schedule_rejects_negative_fields():
    with pytest.raises(GasError):
        GasSchedule(base_tx_cost=-1)


def test_schedule_rejects_inverted_storage_log_ordering():
    # A new slot cheaper than logging 32 bytes would erase the tradeoff.
    with pytest.raises(GasError):
        GasSchedule(storage_new_slot_cost=100, log_cost_per_byte=8)


def test_schedule_round_trips_through_doc(tmp_path):
    doc = DEFAULT_GAS_SCHEDULE.to_doc()
    assert GasSchedule.from_doc(doc) == DEFAULT_GAS_SCHEDULE
    path = tmp_path / "schedule.json"
    import json

    path.write_text(json.dumps(doc))
    assert GasSchedule.load(path) == DEFAULT_GAS_SCHEDULE
    with pytest.raises(GasError):
        GasSchedule.from_doc({**doc, "mystery": 1})
