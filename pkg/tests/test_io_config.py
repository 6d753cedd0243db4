import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorcone import hpm
from tensorcone.config import (
    ConfigError,
    generate,
    parse_model_config,
    parse_sweep_config,
    solver_config_from,
)
from tensorcone.exceptions import FormatError
from tensorcone.io import (
    format_dense,
    format_labels,
    format_tensor,
    parse_dense,
    parse_labels,
    parse_tensor,
    read_tensor,
    write_tensor,
)
from tensorcone.tensor import SymmetricTensor, identity_tensor, sym_dim, zeros

from conftest import random_tensor

COUNTS = """
[model]
kind = counts
n = 8
m = 4
seed = 7

[counts]
T = 1
alpha = 0.9, 0.1, 0
"""


class TestSymtensor:
    def test_header_and_sparse_lines(self):
        text = format_tensor(identity_tensor(2, 4))
        assert text == "SYMTENSOR v1 n=2 m=4\n0 0 0 0 1.0\n1 1 1 1 1.0\n"

    def test_zero_tensor_has_header_only(self):
        assert format_tensor(zeros(3, 2)) == "SYMTENSOR v1 n=3 m=2\n"

    def test_file_round_trip(self, tmp_path, rng):
        A = random_tensor(rng, 5, 4)
        path = tmp_path / "a.sym"
        write_tensor(A, path)
        B = read_tensor(path)
        np.testing.assert_array_equal(A.values, B.values)
        assert format_tensor(B) == path.read_text()

    def test_unordered_lines_and_blank_lines(self):
        A = parse_tensor("SYMTENSOR v1 n=2 m=2\n\n1 1 2.5\n0 1 -1.0\n")
        assert A[1, 0] == -1.0 and A[1, 1] == 2.5 and A[0, 0] == 0.0

    @pytest.mark.parametrize(
        "text,lineno,fragment",
        [
            ("", 1, "header"),
            ("SYMTENSOR v2 n=2 m=2\n", 1, "header"),
            ("SYMTENSOR v1 n=2 m=2\n1 0 1.0\n", 2, "non-decreasing"),
            ("SYMTENSOR v1 n=2 m=2\n0 0 1.0\n0 2 1.0\n", 3, "out of range"),
            ("SYMTENSOR v1 n=2 m=2\n0 1 1.0\n0 1 2.0\n", 3, "duplicate"),
            ("SYMTENSOR v1 n=2 m=2\n0 1 nan\n", 2, "non-finite"),
            ("SYMTENSOR v1 n=2 m=2\n0 1 inf\n", 2, "non-finite"),
            ("SYMTENSOR v1 n=2 m=2\n0 1\n", 2, "fields"),
            ("SYMTENSOR v1 n=2 m=2\n0 x 1.0\n", 2, "integers"),
            ("SYMTENSOR v1 n=2 m=2\n0 1 abc\n", 2, "parse"),
        ],
    )
    def test_errors_carry_line_numbers(self, text, lineno, fragment):
        with pytest.raises(FormatError, match=fragment) as info:
            parse_tensor(text)
        assert info.value.line == lineno
        assert f"line {lineno}" in str(info.value)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 5),
    m=st.integers(1, 4),
    values=st.data(),
)
def test_symtensor_round_trip_is_byte_identical(n, m, values):
    floats = st.floats(allow_nan=False, allow_infinity=False, width=64)
    data = values.draw(st.lists(floats, min_size=sym_dim(n, m), max_size=sym_dim(n, m)))
    A = SymmetricTensor(n, m, data)
    text = format_tensor(A)
    B = parse_tensor(text)
    np.testing.assert_array_equal(A.values, B.values)
    assert format_tensor(B) == text


class TestLabels:
    def test_round_trip(self):
        y = np.array([1, -1, -1, 1])
        assert format_labels(y) == "1 -1 -1 1\n"
        np.testing.assert_array_equal(parse_labels(format_labels(y)), y)

    @pytest.mark.parametrize("text", ["", "1 0 -1 1\n", "1 -1\n1 -1\n", "a b\n"])
    def test_rejects(self, text):
        with pytest.raises(FormatError):
            parse_labels(text)


class TestDense:
    def test_round_trip(self, rng):
        A = random_tensor(rng, 3, 4)
        B = parse_dense(format_dense(A))
        np.testing.assert_array_equal(A.values, B.values)

    def test_line_count(self):
        assert len(format_dense(zeros(2, 4)).splitlines()) == 1 + 2**4

    def test_size_limit(self):
        with pytest.raises(ValueError, match="n <= 5"):
            format_dense(zeros(6, 2))
        with pytest.raises(FormatError):
            parse_dense("DENSETENSOR v1 n=6 m=2\n")

    def test_asymmetric_rejected(self):
        text = "DENSETENSOR v1 n=2 m=2\n0 0 1.0\n0 1 2.0\n1 0 3.0\n1 1 4.0\n"
        with pytest.raises(FormatError):
            parse_dense(text)

    def test_missing_entries(self):
        with pytest.raises(FormatError, match="lists 1 of 4"):
            parse_dense("DENSETENSOR v1 n=2 m=2\n0 0 1.0\n")


class TestModelConfig:
    def test_counts(self):
        cfg = parse_model_config(COUNTS)
        assert (cfg.kind, cfg.n, cfg.m, cfg.seed, cfg.repeats_mode) == ("counts", 8, 4, 7, "sample")
        assert cfg.params.alpha_compact == (0.9, 0.1, 0.0)

    def test_generate_deterministic(self):
        cfg = parse_model_config(COUNTS)
        (W1, y1), (W2, y2) = generate(cfg), generate(cfg)
        assert format_tensor(W1) == format_tensor(W2)
        np.testing.assert_array_equal(y1, y2)
        assert y1.sum() == 0

    def test_all_ones_alpha(self):
        cfg = parse_model_config(COUNTS.replace("0.9, 0.1, 0", "1, 1, 1"))
        W, _ = generate(cfg)
        np.testing.assert_array_equal(W.values, 1.0)

    @pytest.mark.parametrize(
        "old,new,key",
        [
            ("kind = counts", "kind = foo", "kind"),
            ("n = 8", "n = 7", "n"),
            ("m = 4", "m = 3", "m"),
            ("seed = 7", "seed = x", "seed"),
            ("T = 1", "T = 1\nbogus = 2", "bogus"),
            ("alpha = 0.9, 0.1, 0", "alpha = 0.9, 0.1", "alpha"),
            ("seed = 7", "seed = 7\nrepeats_mode = maybe", "repeats_mode"),
            ("[counts]", "[extra]\n[counts]", "extra"),
        ],
    )
    def test_errors_name_key(self, old, new, key):
        with pytest.raises(ConfigError) as info:
            parse_model_config(COUNTS.replace(old, new))
        assert info.value.key == key
        assert key in str(info.value)

    def test_missing_model_section(self):
        with pytest.raises(ConfigError, match="model"):
            parse_model_config("[counts]\nT = 1\n")

    def test_other_kinds(self):
        base = "[model]\nkind = {k}\nn = 8\nm = 4\nseed = 1\n"
        bis = parse_model_config(base.format(k="bisection") + "[bisection]\nq = 0.2\n")
        assert isinstance(bis.params, hpm.BisectionParams)
        cuts = parse_model_config(base.format(k="cuts") + "[cuts]\nalpha = 0.5, 0.2, 0.1\n")
        assert isinstance(cuts.params, hpm.CutsParams)
        motif = parse_model_config(
            base.format(k="motif") + "[motif]\nmotif_edges = 0->1, 1->2, 2->3, 3->0\nalpha4 = 0.3, 0.1, 0.1, 0.3\n"
        )
        assert isinstance(motif.params, hpm.MotifParams)
        for cfg in (bis, cuts, motif):
            W, y = generate(cfg)
            assert W.n == 8 and W.m == 4 and y.sum() == 0

    def test_bad_edge(self):
        text = "[model]\nkind = motif\nn = 8\nm = 4\nseed = 1\n[motif]\nmotif_edges = 0-1\nalpha4 = 0.3, 0.1\n"
        with pytest.raises(ConfigError) as info:
            parse_model_config(text)
        assert info.value.key == "motif_edges"


class TestSweepConfig:
    TEXT = """
[sweep]
kind = counts
n = 8, 12
m = 4
trials = 3
seed = 5

[counts]
T = 1
alpha = 0.9, 0.1, 0 | 0.6, 0.4, 0

[solver]
outer = 10
"""

    def test_grid(self):
        cfg = parse_sweep_config(self.TEXT)
        assert cfg.n_values == (8, 12)
        assert len(cfg.grid) == 2 and len(cfg.points()) == 4
        assert cfg.grid[1]["alpha"] == (0.6, 0.4, 0.0)
        assert cfg.solver == {"outer": 10.0}

    def test_inline_comment_is_not_an_alternative(self):
        cfg = parse_sweep_config(self.TEXT.replace("0.6, 0.4, 0", "0.6, 0.4, 0 ; note"))
        assert len(cfg.grid) == 2

    def test_empty_grid(self):
        with pytest.raises(ConfigError) as info:
            parse_sweep_config(self.TEXT.replace("alpha = 0.9, 0.1, 0 | 0.6, 0.4, 0", "alpha = |"))
        assert info.value.key == "alpha"

    def test_unknown_solver_key(self):
        with pytest.raises(ConfigError) as info:
            parse_sweep_config(self.TEXT.replace("outer = 10", "speed = 10"))
        assert info.value.key == "speed"

    def test_bad_trials(self):
        with pytest.raises(ConfigError) as info:
            parse_sweep_config(self.TEXT.replace("trials = 3", "trials = 0"))
        assert info.value.key == "trials"


def test_solver_config_from_names():
    cfg = solver_config_from({"zeta": 0.1, "outer": 3, "inner": 2, "descent": 5, "gamma": 0.2, "starts": 4}, seed=9)
    assert (cfg.zeta, cfg.outer_iters, cfg.inner_iters, cfg.descent_iters, cfg.seed) == (0.1, 3, 2, 5, 9)
    assert (cfg.ascent.step_gamma, cfg.ascent.num_starts, cfg.ascent.max_iters) == (0.2, 4, 5)
    default = solver_config_from({})
    assert (default.zeta, default.outer_iters, default.inner_iters, default.descent_iters) == (0.05, 100, 40, 20)
