import io
import json

from chaincourier.session import Ack, Reject, Session, handle_message
from chaincourier.sim import score

from conftest import make_scenario


def fresh_session(out=None, bots=None, **overrides):
    return Session(make_scenario(**overrides), max_ticks=500, out=out, bots=bots or [])


def test_join_binds_and_spawns_on_road():
    session = fresh_session()
    reply = handle_message(session, "c1", {"v": 1, "type": "join", "seq": 0,
                                           "player": "alice", "character": "Alice"})
    assert isinstance(reply, Ack)
    node = session.state.nodes[reply.info["node"]]
    assert session.state.world.is_road(node.pos)


def test_character_taken_and_unknown():
    session = fresh_session()
    handle_message(session, "c1", {"v": 1, "type": "join", "seq": 0,
                                   "player": "alice", "character": "Alice"})
    reply = handle_message(session, "c2", {"v": 1, "type": "join", "seq": 0,
                                           "player": "mallory", "character": "Alice"})
    assert isinstance(reply, Reject) and reply.reason == "character_taken"
    reply = handle_message(session, "c3", {"v": 1, "type": "join", "seq": 0,
                                           "player": "eve", "character": "Zed"})
    assert isinstance(reply, Reject) and reply.reason == "unknown_character"


def test_session_full_when_catalog_exhausted():
    session = fresh_session()
    handle_message(session, "c1", {"v": 1, "type": "join", "seq": 0,
                                   "player": "a", "character": "Alice"})
    handle_message(session, "c2", {"v": 1, "type": "join", "seq": 0,
                                   "player": "b", "character": "Bob"})
    reply = handle_message(session, "c3", {"v": 1, "type": "join", "seq": 0,
                                           "player": "c", "character": "Bob"})
    assert isinstance(reply, Reject) and reply.reason == "session_full"


def test_sequence_gap_rejected():
    session = fresh_session()
    handle_message(session, "c1", {"v": 1, "type": "join", "seq": 0,
                                   "player": "a", "character": "Alice"})
    ok = handle_message(session, "c1", {"v": 1, "type": "input", "seq": 1,
                                        "command": {"kind": "idle"}})
    assert isinstance(ok, Ack)
    gap = handle_message(session, "c1", {"v": 1, "type": "input", "seq": 5,
                                         "command": {"kind": "idle"}})
    assert isinstance(gap, Reject) and gap.reason == "sequence_gap"
    # the counter did not advance past the gap; 2 is still next
    again = handle_message(session, "c1", {"v": 1, "type": "input", "seq": 2,
                                           "command": {"kind": "idle"}})
    assert isinstance(again, Ack)


def test_later_input_replaces_earlier_within_tick():
    session = fresh_session()
    reply = handle_message(session, "c1", {"v": 1, "type": "join", "seq": 0,
                                           "player": "a", "character": "Alice"})
    node_id = reply.info["node"]
    handle_message(session, "c1", {"v": 1, "type": "input", "seq": 1,
                                   "command": {"kind": "move", "dir": "n"}})
    handle_message(session, "c1", {"v": 1, "type": "input", "seq": 2,
                                   "command": {"kind": "move", "dir": "s"}})
    commands = session.collect_commands()
    assert len(commands) == 1
    assert commands[0].node == node_id and commands[0].direction == "s"


def test_input_before_join_rejected():
    session = fresh_session()
    reply = handle_message(session, "c9", {"v": 1, "type": "input", "seq": 0,
                                           "command": {"kind": "idle"}})
    assert isinstance(reply, Reject) and reply.reason == "not_joined"


def test_leave_falls_back_to_random_walk_bot():
    session = fresh_session()
    reply = handle_message(session, "c1", {"v": 1, "type": "join", "seq": 0,
                                           "player": "a", "character": "Alice"})
    node_id = reply.info["node"]
    assert node_id not in session.bots
    handle_message(session, "c1", {"v": 1, "type": "leave", "seq": 1})
    assert node_id in session.bots
    assert session.bots[node_id][0].kind == "random"


def test_turbo_runs_are_byte_identical():
    def run_once() -> str:
        buf = io.StringIO()
        session = Session(make_scenario(seed=77), max_ticks=400, out=buf,
                          bots=["miner", "courier"])
        session.run()
        session.finish()
        return buf.getvalue()

    first, second = run_once(), run_once()
    assert first == second
    assert first.count("\n") > 10


def test_round_ends_when_everyone_depleted():
    buf = io.StringIO()
    session = Session(
        make_scenario(energy={"initial": 1, "idle_cost": 0.5}),
        max_ticks=500,
        out=buf,
        bots=["random", "random"],
    )
    state = session.run()
    assert state.tick < 500
    assert all(not n.active for n in state.nodes)
    last = json.loads(buf.getvalue().strip().splitlines()[-1])
    assert last == {"t": "end", "tick": state.tick}


def test_score_rows_cover_all_nodes():
    session = fresh_session(bots=["miner", "courier"])
    session.run()
    report = score(session.state)
    assert [row.node_id for row in report.per_node] == [0, 1]
    assert {row.character for row in report.per_node} == {"Alice", "Bob"}
