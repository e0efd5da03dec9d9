import numpy as np
import pytest

from queuedmd import io, simqueue, sysid
from queuedmd.errors import ParseError, ValidationError
from queuedmd.snapshots import ControlSequence, TimeSeries


def write(path, text):
    path.write_text(text)
    return path


def test_ingest_small_file(tmp_path):
    states = write(tmp_path / "s.csv", ",".join(io.STATE_HEADER) + "\n0,1,2,3,4,5,6,7,8\n1,2,3,4,5,6,7,8,9.5\n")
    controls = write(tmp_path / "c.csv", ",".join(io.CONTROL_HEADER) + "\n0,1,0,1,0,1,0,1,0\n1,0,0,0,0,0,0,0,1\n")
    s, u = io.ingest_csv(states, controls)
    assert s.n_states == 8 and s.n_steps == 2
    assert s.values[7, 1] == 9.5
    assert u.values[0, 0] == 1.0


def test_non_binary_control_names_row_and_column(tmp_path):
    controls = write(tmp_path / "c.csv", ",".join(io.CONTROL_HEADER) + "\n0,1,0,1,0,1,0,1,0\n1,0,0,2,0,0,0,0,1\n")
    with pytest.raises(ValidationError, match=r"row 3 .*u_NB"):
        io.read_controls(controls)


@pytest.mark.parametrize(
    "body, line",
    [
        ("t,q_EB\n0,1\n", 1),
        (",".join(io.STATE_HEADER) + "\n0,1,2,3,4,5,6,7\n", 2),
        (",".join(io.STATE_HEADER) + "\n0,1,2,3,4,5,6,7,8\n1,1,2,x,4,5,6,7,8\n", 3),
        (",".join(io.STATE_HEADER) + "\n0,1,2,3,4,5,6,7,8\n2,1,2,3,4,5,6,7,8\n", 3),
    ],
)
def test_parse_errors_carry_line_numbers(tmp_path, body, line):
    with pytest.raises(ParseError) as info:
        io.read_states(write(tmp_path / "s.csv", body))
    assert info.value.line == line


def test_trace_round_trip_is_bit_exact(tmp_path):
    tr = simqueue.simulate(simqueue.default_config(duration_seconds=1500, seed=9))
    t1 = io.emit_states(tmp_path / "s.csv", tr.queues, tr.t0)
    c1 = io.emit_controls(tmp_path / "c.csv", tr.controls, tr.t0)
    s, u = io.ingest_csv(tmp_path / "s.csv", tmp_path / "c.csv")
    assert s.values.tobytes() == tr.queues.values.tobytes()
    assert u.values.tobytes() == tr.controls.values.tobytes()
    assert io.emit_states(None, s, tr.t0) == t1
    assert io.emit_controls(None, u, tr.t0) == c1


def test_arbitrary_floats_round_trip(rng, tmp_path):
    vals = rng.standard_normal((8, 30)) * 10.0 ** rng.integers(-20, 20, (8, 30))
    vals[0, 0] = -0.0
    text = io.emit_states(tmp_path / "s.csv", TimeSeries(vals))
    back, t0 = io.read_states(tmp_path / "s.csv")
    assert back.values.tobytes() == TimeSeries(vals).values.tobytes()
    assert io.emit_states(None, back) == text


def test_model_round_trip(rng, tmp_path):
    model = sysid.LinearModel(rng.standard_normal((6, 6)), rng.standard_normal((6, 4)), 2, 3, 2, 5, 97)
    io.save_model(tmp_path / "m.txt", model)
    back = io.load_model(tmp_path / "m.txt")
    assert back.a.tobytes() == model.a.tobytes() and back.b.tobytes() == model.b.tobytes()
    assert (back.h, back.n, back.q, back.rank_used, back.training_columns) == (2, 3, 2, 5, 97)
    assert io.dumps_model(back) == (tmp_path / "m.txt").read_text()


def test_model_header_required():
    with pytest.raises(ParseError):
        io.loads_model("A 1 1\n1\n")


def test_parse_keyvalue():
    cfg = io.parse_keyvalue("# comment\nseed = 4\n\nmethod=both  # trailing\n", allowed={"seed", "method"})
    assert cfg == {"seed": "4", "method": "both"}
    with pytest.raises(ParseError, match="unknown key 'sed'"):
        io.parse_keyvalue("sed = 4\n", allowed={"seed"})
    with pytest.raises(ParseError, match="duplicate"):
        io.parse_keyvalue("seed = 4\nseed = 5\n")
    with pytest.raises(ParseError) as info:
        io.parse_keyvalue("seed = 4\nnonsense\n")
    assert info.value.line == 2


def test_controls_written_as_integers(tmp_path):
    text = io.emit_controls(None, ControlSequence(np.eye(8)))
    assert text.split("\n")[1] == "0,1,0,0,0,0,0,0,0"
