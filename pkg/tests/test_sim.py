import pytest

from chaincourier import blockchain as bc
from chaincourier.blockchain import BlockStatus
from chaincourier.sim import (
    Command,
    TickActivity,
    account_energy,
    add_node,
    audit_block_conservation,
    new_state,
    score,
    step,
    validate_command,
)
from chaincourier.worldgen import BaseStation

from conftest import make_scenario, road_strip, world_from_rows


def strip_state(length=21, radios=None, catalog=None, **scenario_overrides):
    """State over a hand-built straight road with Alice (full) and Bob (half)."""
    overrides = dict(scenario_overrides)
    if radios is not None:
        overrides["radios"] = radios
    if catalog is not None:
        overrides["catalog"] = catalog
    sc = make_scenario(**overrides)
    return new_state(sc, world=road_strip(length))


def give_block(state, node, created_tick=None):
    """Manufacture a pending block held by the node, as generation would."""
    tick = state.tick if created_tick is None else created_tick
    block_id = state.next_block_id
    state.next_block_id += 1
    block = bc.Block(
        id=block_id,
        creator=node.id,
        created_tick=tick,
        prev_hash=state.chain.head_hash,
        payload_digest=bc.payload_digest(block_id, node.id, tick),
    )
    state.pending[block_id] = block
    node.carried.append(block_id)
    return block_id


def run_ticks(state, n, commands_for=lambda tick: []):
    events = []
    for _ in range(n):
        events.extend(step(state, commands_for(state.tick + 1)))
    return events


# -- idle ticks and cadence ----------------------------------------------


def test_idle_tick_costs_exactly_idle_cost():
    state = strip_state()
    a = add_node(state, state.scenario.catalog[0], (0, 0))
    b = add_node(state, state.scenario.catalog[1], (5, 0))
    e0 = a.energy_mu
    events = step(state, [])
    assert state.tick == 1
    assert events == []
    assert a.energy_mu == e0 - state.scenario.energy.idle_cost_mu
    assert b.energy_mu == e0 - state.scenario.energy.idle_cost_mu
    assert state.last_energy[a.id].applied_mu == state.scenario.energy.idle_cost_mu


def test_generation_cadence_and_boundaries():
    state = strip_state(expiry_ticks=10_000)
    add_node(state, state.scenario.catalog[0], (0, 0))
    add_node(state, state.scenario.catalog[1], (5, 0))
    events = run_ticks(state, 1000)
    generated = [ev for ev in events if ev.kind == "block_generated"]
    assert len(generated) == 20  # N=5 s, 10 ticks/s -> every 50 ticks
    assert [ev.tick for ev in generated] == [50 * i for i in range(1, 21)]
    audit_block_conservation(state)


def test_no_generation_without_active_nodes():
    state = strip_state()
    events = run_ticks(state, 120)
    assert [ev for ev in events if ev.kind == "block_generated"] == []


def test_step_is_deterministic():
    def build():
        state = strip_state()
        add_node(state, state.scenario.catalog[0], (0, 0))
        add_node(state, state.scenario.catalog[1], (10, 0))
        return state

    def drive(state):
        log = []
        for _ in range(200):
            cmds = [Command(node=1, kind="move", direction="w")]
            log.extend(step(state, cmds))
        return log

    s1, s2 = build(), build()
    log1, log2 = drive(s1), drive(s2)
    assert log1 == log2
    assert [n.pos for n in s1.nodes] == [n.pos for n in s2.nodes]
    assert [n.energy_mu for n in s1.nodes] == [n.energy_mu for n in s2.nodes]


# -- movement -------------------------------------------------------------


def test_movement_accumulator_speed_one():
    catalog = [
        {"name": "Alice", "role": "full", "radios": ["wifi"], "move_speed": 1.0},
        {"name": "Bob", "role": "half", "radios": ["wifi"], "move_speed": 1.0},
    ]
    state = strip_state(catalog=catalog)
    node = add_node(state, state.scenario.catalog[0], (0, 0))
    positions = []
    for _ in range(30):
        step(state, [Command(node=0, kind="move", direction="e")])
        positions.append(node.pos[0])
    # one tile per second at 10 ticks/s: steps land on ticks 10, 20, 30
    assert positions[8] == 0 and positions[9] == 1
    assert positions[18] == 1 and positions[19] == 2
    assert positions[28] == 2 and positions[29] == 3


def test_move_not_ready_is_absorbed_silently():
    state = strip_state()
    add_node(state, state.scenario.catalog[0], (0, 0))
    events = step(state, [Command(node=0, kind="move", direction="e")])
    assert events == []  # accumulator still filling; nothing illegal happened


def test_illegal_move_rejected_when_ready():
    catalog = [
        {"name": "Alice", "role": "full", "radios": ["wifi"], "move_speed": 10.0},
        {"name": "Bob", "role": "half", "radios": ["wifi"], "move_speed": 10.0},
    ]
    sc = make_scenario(catalog=catalog)
    world = world_from_rows(["rr."])
    state = new_state(sc, world=world)
    node = add_node(state, sc.catalog[0], (1, 0))
    events = step(state, [Command(node=0, kind="move", direction="e")])
    assert [ev.kind for ev in events] == ["illegal_command"]
    assert events[0].data["reason"] == "illegal_move"
    assert node.pos == (1, 0)
    # moving off the map edge is equally illegal
    events = step(state, [Command(node=0, kind="move", direction="n")])
    assert events[0].data["reason"] == "illegal_move"


def test_jump_crosses_one_tile_and_costs_triple():
    catalog = [
        {"name": "Hopper", "role": "half", "radios": ["wifi"], "move_speed": 10.0, "can_jump": True},
        {"name": "Walker", "role": "half", "radios": ["wifi"], "move_speed": 10.0},
    ]
    sc = make_scenario(catalog=catalog)
    world = world_from_rows(["r.rr"])
    state = new_state(sc, world=world)
    hopper = add_node(state, sc.catalog[0], (0, 0))
    walker = add_node(state, sc.catalog[1], (3, 0))
    e0 = hopper.energy_mu
    events = step(state, [Command(node=0, kind="jump", direction="e")])
    assert hopper.pos == (2, 0)
    assert [ev.kind for ev in events] == []
    move_cost = state.scenario.energy.move_cost_mu
    idle_cost = state.scenario.energy.idle_cost_mu
    assert e0 - hopper.energy_mu == idle_cost + 3 * move_cost
    # landing off the map is rejected, as is jumping without the skill
    events = step(state, [Command(node=0, kind="jump", direction="e")])
    assert events[0].data["reason"] == "illegal_move"
    assert hopper.pos == (2, 0)
    events = step(state, [Command(node=1, kind="jump", direction="w")])
    assert events[0].data["reason"] == "illegal_move"
    assert walker.pos == (3, 0)


def test_validate_command_move_examples():
    sc = make_scenario()
    world = world_from_rows(["rr.", "...", "..."])
    state = new_state(sc, world=world)
    add_node(state, sc.catalog[0], (1, 0))
    ok, reason = validate_command(state, Command(node=0, kind="move", direction="e"))
    assert (ok, reason) == (False, "illegal_move")
    ok, reason = validate_command(state, Command(node=0, kind="move", direction="w"))
    assert (ok, reason) == (True, None)


# -- energy ----------------------------------------------------------------


def test_account_energy_itemization_example():
    sc = make_scenario()
    activity = TickActivity(tiles_moved=1, hash_attempts=100)
    delta = account_energy(sc.energy, activity, available_mu=10_000_000)
    # idle 0.1 + move 1 + 100 hashes at 0.01 = 2.1 units
    assert delta.total_mu == 2100
    assert delta.applied_mu == 2100
    assert (delta.idle_mu, delta.move_mu, delta.hash_mu) == (100, 1000, 1000)


def test_energy_floor_and_depletion_is_terminal():
    state = strip_state(energy={"initial": 0.45, "idle_cost": 0.1})
    node = add_node(state, state.scenario.catalog[0], (0, 0))
    events = run_ticks(state, 5)
    assert node.energy_mu == 0
    assert node.active is False
    depleted = [ev for ev in events if ev.kind == "energy_depleted"]
    assert len(depleted) == 1 and depleted[0].tick == 5
    # the final tick's applied delta was clamped to the remaining 50 mu
    # (0.45 = 450 mu minus four full idle ticks of 100 mu)
    events = step(state, [Command(node=0, kind="move", direction="e")])
    assert events[0].kind == "illegal_command"
    assert events[0].data["reason"] == "inactive"
    assert node.energy_mu == 0  # no recharge, no further drain


def test_energy_ledger_closes_exactly():
    state = strip_state(energy={"initial": 2, "idle_cost": 0.3})
    node = add_node(state, state.scenario.catalog[0], (0, 0))
    spent = 0
    for _ in range(10):
        step(state, [])
        if node.id in state.last_energy:
            spent += state.last_energy[node.id].applied_mu
    assert state.scenario.energy.initial_mu - node.energy_mu == spent
    assert node.energy_mu == 0  # 2.0 / 0.3 drains within 7 ticks


# -- transfers ---------------------------------------------------------------


SHORT_WIFI = {"wifi": {"sensitivity_dbm": -33.0}}  # usable at <= 2 tiles, urban


def test_transfer_handoff_half_to_full():
    state = strip_state(radios=SHORT_WIFI)
    alice = add_node(state, state.scenario.catalog[0], (1, 0))  # full
    bob = add_node(state, state.scenario.catalog[1], (0, 0))  # half
    block_id = give_block(state, bob)
    events = step(state, [Command(node=bob.id, kind="transfer", block_id=block_id, target=alice.id)])
    transfer = [ev for ev in events if ev.kind == "transfer_completed"]
    assert len(transfer) == 1
    assert transfer[0].data == {"block": block_id, "from": bob.id, "to": alice.id, "tech": "wifi"}
    assert block_id in alice.carried and block_id not in bob.carried
    assert state.pending[block_id].status is BlockStatus.GENERATED
    # transmit cost lands on the sender only
    assert state.last_energy[bob.id].transmit_mu == state.scenario.energy.transmit_cost_mu
    assert state.last_energy[alice.id].transmit_mu == 0
    audit_block_conservation(state)


def test_transfer_without_link_rejected():
    state = strip_state(radios=SHORT_WIFI)
    alice = add_node(state, state.scenario.catalog[0], (10, 0))
    bob = add_node(state, state.scenario.catalog[1], (0, 0))
    block_id = give_block(state, bob)
    events = step(state, [Command(node=bob.id, kind="transfer", block_id=block_id, target=alice.id)])
    assert events[0].kind == "illegal_command"
    assert events[0].data["reason"] == "no_link"
    assert block_id in bob.carried


def test_transfer_not_holder_rejected():
    state = strip_state(radios=SHORT_WIFI)
    alice = add_node(state, state.scenario.catalog[0], (1, 0))
    bob = add_node(state, state.scenario.catalog[1], (0, 0))
    events = step(state, [Command(node=bob.id, kind="transfer", block_id=99, target=alice.id)])
    assert events[0].data["reason"] == "not_holder"


def test_transfer_over_infrastructure_coverage():
    catalog = [
        {"name": "Alice", "role": "full", "radios": ["3g"]},
        {"name": "Bob", "role": "half", "radios": ["3g"]},
    ]
    sc = make_scenario(catalog=catalog)
    covered = world_from_rows(
        ["r" * 12], stations=[BaseStation("3g", (5, 0), 43.0)]
    )
    state = new_state(sc, world=covered)
    alice = add_node(state, sc.catalog[0], (11, 0))
    bob = add_node(state, sc.catalog[1], (0, 0))
    block_id = give_block(state, bob)
    cmd = Command(node=bob.id, kind="transfer", block_id=block_id, target=alice.id)
    assert validate_command(state, cmd) == (True, None)
    events = step(state, [cmd])
    assert any(ev.kind == "transfer_completed" and ev.data["tech"] == "3g" for ev in events)

    # with no stations there is no coverage, hence no exchange
    bare = new_state(sc, world=road_strip(12))
    alice2 = add_node(bare, sc.catalog[0], (11, 0))
    bob2 = add_node(bare, sc.catalog[1], (0, 0))
    bid2 = give_block(bare, bob2)
    events = step(bare, [Command(node=bob2.id, kind="transfer", block_id=bid2, target=alice2.id)])
    assert events[0].data["reason"] == "no_link"


# -- mining and the chain -----------------------------------------------------


def test_mine_lifecycle_difficulty_zero():
    state = strip_state(difficulty_bits=0)
    alice = add_node(state, state.scenario.catalog[0], (0, 0))  # full
    bob = add_node(state, state.scenario.catalog[1], (5, 0))  # half, creator
    block_id = give_block(state, bob, created_tick=0)
    # courier by hand: move the block to alice directly
    bob.carried.remove(block_id)
    alice.carried.append(block_id)
    events = step(state, [Command(node=alice.id, kind="mine", block_id=block_id)])
    kinds = [ev.kind for ev in events]
    assert kinds == ["mining_started", "mining_attempted", "mining_result", "block_appended"]
    assert events[2].data["found"] is True
    assert len(state.chain) == 1
    assert block_id not in alice.carried and block_id not in state.pending
    assert bc.verify_chain(state.chain, state.target)
    report = score(state)
    assert report.per_node[bob.id].blocks_created_validated == 1
    assert report.per_node[bob.id].points == 1
    assert report.per_node[alice.id].blocks_mined == 1
    assert report.per_node[alice.id].points == 3
    assert report.mean_time_to_validation_ticks == 1.0  # created at 0, appended at 1
    audit_block_conservation(state)


def test_mine_by_half_node_rejected():
    state = strip_state()
    add_node(state, state.scenario.catalog[0], (0, 0))
    bob = add_node(state, state.scenario.catalog[1], (5, 0))
    block_id = give_block(state, bob)
    cmd = Command(node=bob.id, kind="mine", block_id=block_id)
    assert validate_command(state, cmd) == (False, "role_violation")
    events = step(state, [cmd])
    assert events[0].kind == "illegal_command"
    assert events[0].data["reason"] == "role_violation"


def test_mining_spans_ticks_at_higher_difficulty():
    state = strip_state(difficulty_bits=16)
    alice = add_node(state, state.scenario.catalog[0], (0, 0))
    block_id = give_block(state, alice)
    events = step(state, [Command(node=alice.id, kind="mine", block_id=block_id)])
    assert [ev.kind for ev in events] == ["mining_started", "mining_attempted"]
    assert alice.job is not None
    assert events[1].data["attempts"] == alice.profile.mining_rate
    # mining a busy block again is rejected
    events = step(state, [Command(node=alice.id, kind="mine", block_id=block_id)])
    assert events[0].data["reason"] == "block_busy"
    # transferring a block under mining is rejected too
    bob = add_node(state, state.scenario.catalog[1], (1, 0))
    ok, reason = validate_command(
        state, Command(node=alice.id, kind="transfer", block_id=block_id, target=bob.id)
    )
    assert (ok, reason) == (False, "block_busy")


def test_block_expiry_timeout():
    state = strip_state(expiry_ticks=5)
    bob = add_node(state, state.scenario.catalog[1], (0, 0))
    block_id = give_block(state, bob, created_tick=0)
    events = run_ticks(state, 5)
    expired = [ev for ev in events if ev.kind == "block_expired"]
    assert len(expired) == 1
    assert expired[0].tick == 5
    assert expired[0].data == {"block": block_id, "holder": bob.id, "reason": "timeout"}
    assert block_id not in bob.carried and block_id not in state.pending
    audit_block_conservation(state)


def test_losing_sibling_expires_stale_after_append():
    state = strip_state(difficulty_bits=0)
    alice = add_node(state, state.scenario.catalog[0], (0, 0))
    bob = add_node(state, state.scenario.catalog[1], (5, 0))
    winner = give_block(state, alice, created_tick=0)
    loser = give_block(state, bob, created_tick=0)
    events = step(state, [Command(node=alice.id, kind="mine", block_id=winner)])
    kinds = [ev.kind for ev in events]
    assert "block_appended" in kinds
    stale = [ev for ev in events if ev.kind == "block_expired"]
    assert len(stale) == 1
    assert stale[0].data == {"block": loser, "holder": bob.id, "reason": "stale"}
    assert state.pending == {}
    audit_block_conservation(state)


def test_duplicate_commands_rejected():
    state = strip_state()
    add_node(state, state.scenario.catalog[0], (0, 0))
    events = step(
        state,
        [
            Command(node=0, kind="move", direction="e"),
            Command(node=0, kind="move", direction="w"),
        ],
    )
    dup = [ev for ev in events if ev.data.get("reason") == "duplicate_command"]
    assert len(dup) == 1


def test_mean_ttv_matches_event_log_oracle():
    state = strip_state(difficulty_bits=0, block_interval_n=1, expiry_ticks=10_000)
    alice = add_node(state, state.scenario.catalog[0], (0, 0))
    events = []
    for _ in range(100):
        cmds = []
        if alice.carried and alice.job is None:
            cmds = [Command(node=alice.id, kind="mine", block_id=alice.carried[0])]
        events.extend(step(state, cmds))
    created = {}
    gaps = []
    for ev in events:
        if ev.kind == "block_generated":
            created[ev.data["block"]] = ev.tick
        elif ev.kind == "block_appended":
            gaps.append(ev.tick - created[ev.data["block"]])
    assert gaps, "the round should have appended blocks"
    oracle_mean = sum(gaps) / len(gaps)
    assert score(state).mean_time_to_validation_ticks == pytest.approx(oracle_mean)


def test_fresh_state_scores_zero():
    state = strip_state()
    add_node(state, state.scenario.catalog[0], (0, 0))
    report = score(state)
    assert report.per_node[0].points == 0
    assert report.validated_per_minute == 0.0
    assert report.mean_time_to_validation_ticks is None
