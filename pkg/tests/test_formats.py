import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latdiff.correlations import CorrelationQuery, autocorr_table
from latdiff.diffraction import binned_means, periodogram
from latdiff.formats import (
    PGM_MAX,
    ArtifactIOError,
    format_table_csv,
    format_window_csv,
    parse_query,
    parse_window_csv,
    read_grid_pgm,
    read_window_csv,
    write_grid_pgm,
    write_table_csv,
    write_window_csv,
)
from latdiff.lattice import Alphabet, UniformCircle, WeightWindow
from latdiff.samplers import Bernoulli, Ledrappier, SamplerSpec, Times23, sample


def test_single_site_csv():
    text = format_window_csv(WeightWindow.constant(1, 1))
    assert text == "a,b,re,im\n0,0,1,0\n"


def test_empty_table_is_header_only(tmp_path):
    path = write_table_csv(None, tmp_path / "t.csv")
    assert path.read_text() == "za,zb,re,im,pairs\n"


def test_table_csv_rows():
    text = format_table_csv(autocorr_table(WeightWindow.constant(4, 4), 1))
    lines = text.splitlines()
    assert len(lines) == 10 and "0,0,1,0,16" in lines


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sign_window_round_trip(tmp_path, seed):
    w = sample(SamplerSpec(Ledrappier(), 9, 7, seed)).translate((3, -2))
    path = write_window_csv(w, tmp_path / "w.csv")
    back = read_window_csv(path)
    assert back == w and back.alphabet is Alphabet.PLUS_MINUS_ONE


@pytest.mark.parametrize("system", [Bernoulli(UniformCircle()), Times23()])
def test_circle_window_round_trip(system):
    w = sample(SamplerSpec(system, 8, 6, 5))
    back = parse_window_csv(format_window_csv(w))
    assert np.max(np.abs(back.data - w.data)) <= 1e-15


def test_malformed_csv():
    with pytest.raises(ValueError):
        parse_window_csv("x,y\n")
    with pytest.raises(ValueError):
        parse_window_csv("a,b,re,im\n0,0,1,0\n2,0,1,0\n")


def test_pgm_round_trip(tmp_path):
    grid = periodogram(sample(SamplerSpec(Ledrappier(), 64, 64, 2)))
    clip = 8.0
    path = write_grid_pgm(grid, tmp_path / "g.pgm", clip=clip)
    assert path.read_bytes().startswith(b"P5\n64 64\n65535\n")
    back = read_grid_pgm(path)
    expected = binned_means(np.minimum(grid.values, clip))
    assert np.max(np.abs(binned_means(back.values) - expected)) <= clip / PGM_MAX


def test_missing_file():
    with pytest.raises(ArtifactIOError):
        read_window_csv("/nonexistent/w.csv")


def test_query_grammar():
    q = parse_query("(0,1):-2,(1,1):1")
    assert q == CorrelationQuery.of(((0, 1), -2), ((1, 1), 1))
    assert parse_query("(0,0)*, (2,1)") == CorrelationQuery.of(((0, 0), -1), ((2, 1), 1))
    assert parse_query(" ( -3 , 4 ) : 3 ") == CorrelationQuery.of(((-3, 4), 3))
    for bad in ("", "(0,0),", "(0,0)(1,1)", "(0,x)", "0,0"):
        with pytest.raises(ValueError):
            parse_query(bad)


@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20), st.integers(-5, 5)),
                min_size=1, max_size=6))
@settings(max_examples=60)
def test_query_format_round_trip(terms):
    q = CorrelationQuery(tuple(((a, b), m) for a, b, m in terms))
    assert parse_query(str(q)) == q
