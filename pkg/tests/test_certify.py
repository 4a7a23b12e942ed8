from __future__ import annotations

import json

import numpy as np
import pytest

from sosmult.certify import (
    MultiplierCertificate,
    StrictSeparator,
    build_multiplier_problem,
    certify_multiplier,
    sample_pos_interior,
    search_min_multiplier_degree,
    separator_margin,
    verify_certificate,
    verify_separator,
)
from sosmult.cli import deltoid_witness, motzkin
from sosmult.curves import deltoid, p2, quartic_triple_point


@pytest.fixture(scope="module")
def deltoid_case():
    X = deltoid()
    f = X.restrict(deltoid_witness(2))
    return X, f, certify_multiplier(X, f, 2, 1), certify_multiplier(X, f, 2, 2)


def test_certificate_identity_holds_pointwise(deltoid_case):
    X, f, _, cert = deltoid_case
    assert isinstance(cert, MultiplierCertificate)
    F = deltoid_witness(2).to_float()
    for p in X.real_samples(40):
        vk = X.evaluate_basis(cert.k, p)
        vjk = X.evaluate_basis(cert.j + cert.k, p)
        lhs = float(F(list(p))) * vk @ cert.gram_A @ vk
        rhs = vjk @ cert.gram_B @ vjk
        assert abs(lhs - rhs) < 1e-6 * (1 + abs(rhs))


def test_separator_splits_random_elements(deltoid_case):
    X, f, sep, _ = deltoid_case
    assert isinstance(sep, StrictSeparator)
    ell = sep.ell.normalized()
    rng = np.random.default_rng(3)
    T = X.mult_tensor(sep.j + sep.k, sep.j + sep.k)
    Tk = X.mult_tensor(sep.k, sep.k)
    for _ in range(20):
        h = rng.standard_normal(T.shape[0])
        assert ell(np.einsum("u,v,uvw->w", h, h, T)) > 0
        g = rng.standard_normal(Tk.shape[0])
        g2 = np.einsum("u,v,uvw->w", g, g, Tk)
        fg = X.multiply_to_coords(np.asarray(f, float), 4, g2, 2 * sep.k)
        assert ell(fg) < 0


def test_tampered_answers_are_rejected(deltoid_case):
    X, f, sep, cert = deltoid_case
    bad = MultiplierCertificate(cert.j, cert.k, -cert.gram_A, cert.gram_B, 0.0, (0.0, 0.0))
    reasons = []
    assert not verify_certificate(X, f, bad, 1e-6, reasons) and reasons
    bad = MultiplierCertificate(cert.j, cert.k, cert.gram_A, cert.gram_B * 1.01, 0.0, (0.0, 0.0))
    assert not verify_certificate(X, f, bad)
    flipped = StrictSeparator(sep.j, sep.k, sep.ell * -1.0, 0.0)
    assert not verify_separator(X, f, flipped)
    assert verify_separator(X, f, sep, 1e-6)
    assert separator_margin(X, f, sep) == pytest.approx(sep.margin)


def test_json_round_trips(deltoid_case):
    X, f, sep, cert = deltoid_case
    c2 = MultiplierCertificate.from_json(json.loads(json.dumps(cert.to_json())))
    assert verify_certificate(X, f, c2)
    s2 = StrictSeparator.from_json(X, json.loads(json.dumps(sep.to_json())))
    assert verify_separator(X, f, s2)


def test_problem_shape():
    X = deltoid()
    f = X.restrict(deltoid_witness(2))
    P = build_multiplier_problem(X, f, 2, 1)
    assert P.blocks == [X.hilbert_function(1), X.hilbert_function(3)]
    assert len(P.constraints) == X.hilbert_function(6) + 1
    with pytest.raises(ValueError):
        build_multiplier_problem(X, [0.0] * X.hilbert_function(4), 2, 1)
    with pytest.raises(ValueError):
        build_multiplier_problem(X, f, 3, 1)


def test_search_stops_at_first_certificate():
    X = p2()
    f = X.restrict(motzkin())
    rows = search_min_multiplier_degree(X, f, 3, 2)
    assert [r.kind for r in rows] == ["separator", "certificate"]
    assert all(r.seconds >= 0 for r in rows)


def test_pos_samples_are_positive_on_the_curve():
    X = quartic_triple_point()
    rng = np.random.default_rng(5)
    dense = X.real_samples(20000)
    for j in (1, 2):
        f, lift = sample_pos_interior(X, j, rng)
        vals = np.array([float(lift(list(p))) for p in dense])
        assert vals.min() > 0
        assert len(f) == X.hilbert_function(2 * j)
