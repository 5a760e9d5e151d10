"""Generator module: driver arithmetic, transcripts, seeding, serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaosbits import (
    ChaoticBitGenerator,
    DegenerateSeedError,
    GeneratorConfig,
    LogisticDriver,
    SeedSpec,
    TranscriptDriver,
    TranscriptExhausted,
    bits_to_ascii,
    chaotic_step,
    config_from_text,
    config_to_text,
    generate_bits,
    logistic_step,
    m_from_y,
    pack_bits,
    parse_ascii_bits,
    seed_from_time,
    strategy_from_y,
    transcript_from_text,
)

# The published worked example: seed vector, forced transcripts, output.
X0 = (1, 0, 1, 0, 0)
S_TRANSCRIPT = (2, 4, 2, 2, 5, 1, 1, 5, 5, 3, 2, 3, 3)
M_TRANSCRIPT = (4, 5, 4)
OUTPUT_20 = "10100111101111110011"

# Binary64 logistic orbit from y0 = 0.484076 (frozen from an
# independent binary64 evaluation; the printed 6-digit prefixes are
# 0.998985, 0.004053, 0.016146, 0.063543, 0.238022, 0.725470, 0.796651).
ORBIT_FROM_0_484076 = (
    0.9989857048960001,
    0.004053065237767458,
    0.016146551599783437,
    0.06354336188487587,
    0.2380224121809743,
    0.7254709739220987,
    0.7966513596744812,
)


def table1_config(**overrides):
    base = dict(n_cells=5, m_set=(4, 5), seed=SeedSpec.explicit(X0, 0.1))
    base.update(overrides)
    return GeneratorConfig(**base)


def table1_generator(**overrides):
    return ChaoticBitGenerator(table1_config(**overrides), driver=TranscriptDriver(M_TRANSCRIPT, S_TRANSCRIPT))


# -- logistic_step ------------------------------------------------------


def test_logistic_step_exact_values():
    assert logistic_step(0.5) == 1.0
    assert logistic_step(0.0) == 0.0
    assert logistic_step(1.0) == 0.0


def test_logistic_orbit_binary64_exact():
    y = 0.484076
    for expected in ORBIT_FROM_0_484076:
        y = logistic_step(y)
        assert y == expected


def test_logistic_orbit_printed_prefixes():
    printed = ("0.998985", "0.004053", "0.016146", "0.063543",
               "0.238022", "0.725470", "0.796651")
    y = 0.484076
    for prefix in printed:
        y = logistic_step(y)
        assert f"{y:.12f}".startswith(prefix)


def test_logistic_step_rejects_out_of_range():
    with pytest.raises(ValueError):
        logistic_step(-0.1)
    with pytest.raises(ValueError):
        logistic_step(1.0000001)


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_logistic_step_closed_on_unit_interval(y):
    assert 0.0 <= logistic_step(y) <= 1.0


# -- strategy_from_y / m_from_y -----------------------------------------


def test_strategy_examples():
    assert strategy_from_y(0.0, 5) == 1
    assert strategy_from_y(0.25, 5) == 1  # 2_500_000 mod 5 = 0
    # Binary64 value frozen from an integer oracle on the float product.
    assert strategy_from_y(0.998985, 5) == 1


def test_strategy_transcript_from_orbit():
    # Frozen: strategy values over the orbit y0, y1, ... from 0.484076.
    y = 0.484076
    got = []
    for _ in range(13):
        got.append(strategy_from_y(y, 5))
        y = logistic_step(y)
    assert tuple(got) == (1, 3, 1, 1, 4, 5, 5, 4, 4, 2, 1, 2, 2)


def test_strategy_rejects_bad_inputs():
    with pytest.raises(ValueError):
        strategy_from_y(-0.5, 5)
    with pytest.raises(ValueError):
        strategy_from_y(0.5, 1)


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), st.integers(2, 64))
def test_strategy_always_in_range(y, n):
    assert 1 <= strategy_from_y(y, n) <= n


def test_m_from_y_two_element_threshold():
    assert m_from_y(0.484076, (4, 5)) == 4
    assert m_from_y(0.5, (4, 5)) == 5
    assert m_from_y(0.999, (14, 15)) == 15
    assert m_from_y(0.0, (4, 5)) == 4
    assert m_from_y(1.0, (4, 5)) == 5  # top endpoint clamps to the last element


def test_m_from_y_gap_transcript_from_orbit():
    # The published gap listing for M={4,5} from y0 = 0.484076.
    y = 0.484076
    got = []
    for _ in range(7):
        got.append(m_from_y(y, (4, 5)))
        y = logistic_step(y)
    assert tuple(got) == (4, 5, 4, 4, 4, 4, 5)


def test_m_from_y_singleton_is_constant():
    for y in (0.0, 0.3, 0.77, 1.0):
        assert m_from_y(y, (8,)) == 8


def test_m_from_y_equal_width_partition():
    mset = (1, 2, 3, 4)
    assert m_from_y(0.0, mset) == 1
    assert m_from_y(0.249, mset) == 1
    assert m_from_y(0.25, mset) == 2
    assert m_from_y(0.74, mset) == 3
    assert m_from_y(0.75, mset) == 4


def test_m_from_y_rejects_bad_inputs():
    with pytest.raises(ValueError):
        m_from_y(1.5, (4, 5))
    with pytest.raises(ValueError):
        m_from_y(0.5, ())


# -- chaotic_step --------------------------------------------------------


def test_chaotic_step_examples():
    assert chaotic_step((1, 0, 1, 0, 0), 2) == (1, 1, 1, 0, 0)
    assert chaotic_step((1, 1, 1, 1, 0), 5) == (1, 1, 1, 1, 1)


def test_chaotic_step_out_of_range():
    with pytest.raises(ValueError):
        chaotic_step((1, 0), 0)
    with pytest.raises(ValueError):
        chaotic_step((1, 0), 3)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=32), st.data())
def test_chaotic_step_flips_exactly_one_cell(x, data):
    s = data.draw(st.integers(1, len(x)))
    y = chaotic_step(x, s)
    diffs = [i for i, (u, v) in enumerate(zip(x, y)) if u != v]
    assert diffs == [s - 1]
    assert chaotic_step(y, s) == tuple(x)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=32))
def test_full_negation_decomposes_cellwise(x):
    y = tuple(x)
    for s in range(1, len(x) + 1):
        y = chaotic_step(y, s)
    assert y == tuple(1 - b for b in x)


# -- seed handling -------------------------------------------------------


def test_seed_from_time_worked_example():
    x0, y0 = seed_from_time(484076, 5)
    assert y0 == 0.484076
    assert x0 == (0, 1, 1, 0, 0)  # 484076 mod 32 = 12, big-endian


def test_seed_from_time_digit_scaling():
    assert seed_from_time(7, 3)[1] == 0.7
    assert seed_from_time(123, 3)[1] == 0.123


def test_seed_from_time_rejects_degenerate():
    with pytest.raises(DegenerateSeedError):
        seed_from_time(0, 5)
    with pytest.raises(DegenerateSeedError):
        seed_from_time(250000, 5)  # y0 = 0.25
    with pytest.raises(DegenerateSeedError):
        seed_from_time(5, 5)  # y0 = 0.5


def test_seed_from_time_rejects_bad_args():
    with pytest.raises(ValueError):
        seed_from_time(-1, 5)
    with pytest.raises(ValueError):
        seed_from_time(484076, 1)


def test_seedspec_forms():
    assert SeedSpec.from_time(484076).resolve(5) == ((0, 1, 1, 0, 0), 0.484076)
    spec = SeedSpec.explicit((1, 0, 1), 0.3)
    assert spec.resolve(3) == ((1, 0, 1), 0.3)
    with pytest.raises(ValueError):
        spec.resolve(5)  # length mismatch
    with pytest.raises(ValueError):
        SeedSpec(t=1, x0=(1, 0), y0=0.3)  # both forms
    with pytest.raises(ValueError):
        SeedSpec()  # neither form
    with pytest.raises(ValueError):
        SeedSpec.explicit((1, 2), 0.3)  # non-bit component


@pytest.mark.parametrize("y0", [0.0, 1.0, 0.25, 0.5, 0.75, -0.2, 1.7])
def test_seedspec_rejects_degenerate_y0(y0):
    with pytest.raises(DegenerateSeedError):
        SeedSpec.explicit((1, 0), y0)


def test_generator_config_validation():
    seed = SeedSpec.from_time(484076)
    cfg = GeneratorConfig(5, (15, 14), seed)
    assert cfg.m_set == (14, 15)  # stored sorted
    assert cfg.emit_initial is True
    with pytest.raises(ValueError):
        GeneratorConfig(1, (4, 5), seed)
    with pytest.raises(ValueError):
        GeneratorConfig(5, (), seed)
    with pytest.raises(ValueError):
        GeneratorConfig(5, (4, 4), seed)
    with pytest.raises(ValueError):
        GeneratorConfig(5, (0, 4), seed)
    with pytest.raises(ValueError):
        GeneratorConfig(5, (4, 5), "not a seed")


# -- block emission and the worked example -------------------------------


def test_table1_blocks():
    gen = table1_generator()
    assert gen.next_block() == (1, 0, 1, 0, 0)  # block 0 = seed vector
    assert gen.next_block() == (1, 1, 1, 1, 0)  # after S=2,4,2,2 (m=4)
    assert gen.next_block() == (1, 1, 1, 1, 1)  # after S=5,1,1,5,5 (m=5)
    assert gen.next_block() == (1, 0, 0, 1, 1)  # after S=3,2,3,3 (m=4)


def test_table1_output_string():
    bits = table1_generator().bits(20)
    assert "".join(map(str, bits)) == OUTPUT_20


def test_table1_via_generate_bits():
    cfg = table1_config()
    driver = TranscriptDriver(M_TRANSCRIPT, S_TRANSCRIPT)
    bits = generate_bits(cfg, 20, driver=driver)
    assert "".join(map(str, bits)) == OUTPUT_20


def test_emit_initial_off_starts_with_first_driven_block():
    gen = table1_generator(emit_initial=False)
    assert gen.next_block() == (1, 1, 1, 1, 0)


def test_generate_bits_count_zero():
    assert generate_bits(table1_config(), 0).size == 0


def test_bits_truncation_law():
    cfg = GeneratorConfig(5, (14, 15), SeedSpec.from_time(484076))
    whole = generate_bits(cfg, 10)
    assert generate_bits(cfg, 7).tolist() == whole[:7].tolist()


def test_bits_match_block_concatenation():
    cfg = GeneratorConfig(5, (14, 15), SeedSpec.from_time(484076))
    gen_blocks = ChaoticBitGenerator(cfg)
    concat = []
    for _ in range(4):
        concat.extend(gen_blocks.next_block())
    assert generate_bits(cfg, 20).tolist() == concat


@given(st.integers(0, 40))
def test_bits_split_equals_single_call(split):
    cfg = GeneratorConfig(5, (4, 5), SeedSpec.from_time(484076))
    gen = ChaoticBitGenerator(cfg)
    a = gen.bits(split).tolist()
    b = gen.bits(40 - split).tolist()
    assert a + b == generate_bits(cfg, 40).tolist()


def test_determinism():
    cfg = GeneratorConfig(5, (14, 15), SeedSpec.from_time(484076))
    assert generate_bits(cfg, 1000).tolist() == generate_bits(cfg, 1000).tolist()


def test_state_tracks_consumption():
    # With seed y0, a driven block consumes 1 gap sample + m strategy
    # samples; the stored y is always the next unconsumed sample.
    cfg = GeneratorConfig(5, (4, 5), SeedSpec.from_time(484076), emit_initial=False)
    gen = ChaoticBitGenerator(cfg)
    assert gen.state.y == 0.484076
    assert gen.state.iter_count == 0
    gen.next_block()  # gap from y0 (m=4), strategies from y1..y4
    st_after = gen.state
    assert st_after.iter_count == 4
    assert st_after.blocks_emitted == 1
    y = 0.484076
    for _ in range(5):
        y = logistic_step(y)
    assert st_after.y == y


def test_initial_block_consumes_no_samples():
    cfg = GeneratorConfig(5, (4, 5), SeedSpec.from_time(484076), emit_initial=True)
    gen = ChaoticBitGenerator(cfg)
    gen.next_block()
    assert gen.state.y == 0.484076
    assert gen.state.iter_count == 0
    assert gen.state.blocks_emitted == 1


def test_block_arithmetic_iter_count_is_sum_of_gaps():
    driver = TranscriptDriver((3, 4, 5), (1, 2), cycle=True)
    cfg = GeneratorConfig(4, (1,), SeedSpec.explicit((0, 0, 0, 0), 0.1))
    gen = ChaoticBitGenerator(cfg, driver=driver)
    gen.next_block()  # initial emission, no gap drawn
    assert gen.state.iter_count == 0
    for expected in (3, 7, 12):
        gen.next_block()
        assert gen.state.iter_count == expected


def test_hamming_step_through_generator():
    # Consecutive internal states differ in exactly one cell; observe
    # via single-step blocks (m=1), where each block is one cell update.
    cfg = GeneratorConfig(8, (1,), SeedSpec.from_time(484076), emit_initial=True)
    gen = ChaoticBitGenerator(cfg)
    prev = gen.next_block()
    for _ in range(50):
        cur = gen.next_block()
        assert sum(1 for a, b in zip(prev, cur) if a != b) == 1
        prev = cur


def test_reference_simulation_matches_generator():
    # Independent re-simulation from the module-level operations.
    cfg = GeneratorConfig(5, (4, 5), SeedSpec.from_time(484076), emit_initial=True)
    x, y = seed_from_time(484076, 5)
    expected_bits = list(x)
    for _ in range(20):
        m = m_from_y(y, (4, 5))
        y = logistic_step(y)
        for _ in range(m):
            s = strategy_from_y(y, 5)
            y = logistic_step(y)
            x = chaotic_step(x, s)
        expected_bits.extend(x)
    got = generate_bits(cfg, len(expected_bits)).tolist()
    assert got == expected_bits


class _GenericPathDriver(LogisticDriver):
    """Subclass only to force the generic (non-inlined) block loop."""


def test_fast_path_equals_generic_path():
    cfg = GeneratorConfig(5, (14, 15), SeedSpec.from_time(484076))
    fast = generate_bits(cfg, 500)
    generic = generate_bits(cfg, 500, driver=_GenericPathDriver(0.484076))
    assert fast.tolist() == generic.tolist()


def test_fast_path_equals_generic_path_wide_state():
    cfg = GeneratorConfig(70, (2, 3), SeedSpec.from_time(903211))
    fast = generate_bits(cfg, 700)
    generic = generate_bits(cfg, 700, driver=_GenericPathDriver(0.903211))
    assert fast.tolist() == generic.tolist()


def test_degenerate_orbit_raises_mid_run():
    # 4*y*(1-y) rounds to exactly 1.0 for y = 0.5 + 1 ulp, after which
    # the orbit falls to 0 and freezes; the error must surface instead
    # of a constant stream.
    y0 = 0.5000000000000001
    cfg = GeneratorConfig(2, (1,), SeedSpec.explicit((0, 1), y0), emit_initial=False)
    gen = ChaoticBitGenerator(cfg)
    gen.next_block()  # consumes y0 and 1.0
    with pytest.raises(DegenerateSeedError):
        gen.next_block()  # next gap draw sees the fixed point 0.0
    assert gen.state.y == 0.0  # failing sample left unconsumed


def test_state_key_determines_future():
    cfg = GeneratorConfig(5, (4, 5), SeedSpec.from_time(484076))
    a = ChaoticBitGenerator(cfg)
    b = ChaoticBitGenerator(cfg)
    for _ in range(7):
        a.advance_block()
        b.advance_block()
    assert a.state_key() == b.state_key()
    assert a.advance_block() == b.advance_block()


def test_transcript_driver_exhaustion_and_cycling():
    gen = table1_generator()
    gen.bits(20)
    with pytest.raises(TranscriptExhausted):
        gen.bits(5)
    cyc = ChaoticBitGenerator(
        table1_config(), driver=TranscriptDriver(M_TRANSCRIPT, S_TRANSCRIPT, cycle=True)
    )
    assert cyc.bits(60).size == 60


def test_transcript_driver_validation():
    with pytest.raises(ValueError):
        TranscriptDriver((), (1,))
    with pytest.raises(ValueError):
        TranscriptDriver((1,), (0,))
    gen = ChaoticBitGenerator(
        GeneratorConfig(2, (1,), SeedSpec.explicit((0, 0), 0.1), emit_initial=False),
        driver=TranscriptDriver((1,), (5,)),
    )
    with pytest.raises(ValueError):
        gen.next_block()  # strategy 5 out of range for 2 cells


def test_generator_state_under_transcript_driver_has_nan_y():
    gen = table1_generator()
    assert math.isnan(gen.state.y)


# -- packing and text formats --------------------------------------------


def test_pack_bits_worked_example():
    bits = [int(c) for c in OUTPUT_20]
    assert pack_bits(bits)[:2] == bytes([0xA7, 0xBF])


def test_pack_bits_padding_and_empty():
    assert pack_bits([1, 1, 1]) == bytes([0xE0])
    assert pack_bits([]) == b""
    with pytest.raises(ValueError):
        pack_bits([0, 2, 1])


def test_ascii_round_trip_and_wrap():
    bits = [1, 0, 1, 0, 0, 1, 1, 1, 1, 0]
    assert bits_to_ascii(bits) == "1010011110"
    assert bits_to_ascii(bits, wrap=4) == "1010\n0111\n10\n"
    assert parse_ascii_bits(bits_to_ascii(bits, wrap=3)).tolist() == bits
    assert parse_ascii_bits(" 10\n1 ").tolist() == [1, 0, 1]
    with pytest.raises(ValueError):
        parse_ascii_bits("10x1")


@given(st.lists(st.integers(0, 1), max_size=200), st.integers(0, 17))
def test_ascii_round_trip_property(bits, wrap):
    assert parse_ascii_bits(bits_to_ascii(bits, wrap=wrap)).tolist() == bits


def test_config_text_round_trip_time_seed():
    cfg = GeneratorConfig(5, (14, 15), SeedSpec.from_time(484076), emit_initial=False)
    assert config_from_text(config_to_text(cfg)) == cfg


def test_config_text_round_trip_explicit_seed():
    cfg = GeneratorConfig(5, (4, 5), SeedSpec.explicit((1, 0, 1, 0, 0), 0.4840760000000001))
    back = config_from_text(config_to_text(cfg))
    assert back == cfg
    assert back.seed.y0 == 0.4840760000000001  # bit-exact through repr


def test_config_text_tolerates_comments_and_blanks():
    text = "# a comment\n\nn_cells=5\nm_set=14,15\nseed.t=484076\n"
    cfg = config_from_text(text)
    assert cfg.n_cells == 5
    assert cfg.m_set == (14, 15)
    assert cfg.emit_initial is True


@pytest.mark.parametrize(
    "text",
    [
        "n_cells=5\nm_set=4,5\n",  # missing seed
        "n_cells=5\nm_set=4,5\nseed.t=1\nseed.y0=0.3\n",  # mixed seed forms
        "n_cells=5\nm_set=4,5\nseed.t=1\nbogus=1\n",  # unknown key
        "n_cells=5\nn_cells=5\nm_set=4,5\nseed.t=1\n",  # duplicate key
        "n_cells=5\nm_set=4,5\nseed.t=1\nemit_initial=maybe\n",  # bad flag
        "m_set=4,5\nseed.t=1\n",  # missing n_cells
        "n_cells=five\nm_set=4,5\nseed.t=1\n",  # bad integer
        "n_cells=5\nm_set=4,5\nseed.x0=102\nseed.y0=0.3\n",  # bad bit string
        "n_cells 5\nm_set=4,5\nseed.t=1\n",  # not key=value
    ],
)
def test_config_text_rejects_malformed(text):
    with pytest.raises(ValueError):
        config_from_text(text)


def test_transcript_from_text():
    m, s = transcript_from_text("# forced\nm=4,5,4\ns=2,4,2,2,5\n")
    assert m == (4, 5, 4)
    assert s == (2, 4, 2, 2, 5)
    with pytest.raises(ValueError):
        transcript_from_text("m=4,5\n")
    with pytest.raises(ValueError):
        transcript_from_text("m=4,x\ns=1\n")
    with pytest.raises(ValueError):
        transcript_from_text("q=1\nm=1\ns=1\n")
