#!/usr/bin/env python3
"""Smoke test for the rswalk extension module.

Build and stage the module first (see python/run_smoke.sh, or):

    cargo build -p rswalk-py --release
    cp target/release/librswalk.so python/rswalk.so

then run `python3 python/smoke_test.py`.
"""

import math
import sys

import rswalk


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    # pair generation and the exact identities
    pair = rswalk.RudinShapiroPair.generate(2)
    assert pair.p() == [1, 1, 1, -1], pair.p()
    assert pair.q() == [1, 1, -1, 1], pair.q()
    assert rswalk.parseval_check(10)
    assert rswalk.alt_recursion_check(8)

    # exact Laurent arithmetic, including the variant-mismatch guard
    p = rswalk.LaurentPoly.integers(0, [1, 1])
    q = rswalk.LaurentPoly.integers(-1, [1, 1])
    assert p.multiply(q).constant_term() == 2
    r = rswalk.LaurentPoly.rationals(0, ["1/2", "1/3"])
    try:
        p.multiply(r)
    except ValueError as e:
        assert "variant" in str(e)
    else:
        raise AssertionError("variant mismatch must raise ValueError")
    assert p.reverse().low() == -1
    assert p.substitute_power(2).coefficient(2) == 1
    assert p.power(2).coefficient(1) == 2

    # exact moments
    assert rswalk.exact_even_moment(2, 2) == "5/16"
    assert rswalk.exact_even_moment(12, 1) == "1/2"
    assert rswalk.exact_mixed_moment(3, 2, 2) == rswalk.exact_even_moment(3, 2)

    # circle statistics
    values = rswalk.eval_at_roots(1, 2)
    assert close(values[0], 2.0) and close(values[1], 0.0)
    report = rswalk.saffari_report(10, 1 << 14, bins=8)
    assert report["ks_statistic"] < 0.05
    assert close(sum(m for _, _, m in report["bins"]), 1.0)
    residual, norm_dev = rswalk.link_check(6, samples=200, seed=1)
    assert residual <= 1e-10 and norm_dev <= 1e-10

    # representation matrices
    tau = rswalk.tau_matrix(1)
    s = 1 / math.sqrt(2)
    assert close(tau[0][0], s * 1j, 1e-14) and close(tau[1][1], -s * 1j, 1e-14)
    rep = rswalk.rep_matrix(2, rswalk.g_of(1.0 + 0j))
    tau3 = rswalk.tau_matrix(2)
    assert all(
        close(rep[i][j], tau3[i][j], 1e-13) for i in range(3) for j in range(3)
    )
    props = rswalk.verify_propositions(8)
    assert props["contractions_ok"] and props["patterns_full_rank"]

    # halving-operator spectra
    nilpotent = rswalk.spectral_radius(2)
    assert nilpotent["spectral_radius"] <= 1e-12
    contracting = rswalk.spectral_radius(4)
    assert contracting["spectral_radius"] < 1 - 1e-6
    twisted = rswalk.spectral_radius(3, 1)
    assert twisted["dim"] == 8 and twisted["spectral_radius"] < 1 - 1e-6
    assert max(abs(e) for e in rswalk.expected_rep(2, 3)[0]) <= 1e-12
    residual, support_ok = rswalk.cross_check_symbolic(3, 1, 2)
    assert residual <= 1e-10 and support_ok

    # lacunary walks on finite groups
    group, f = rswalk.StepFunction.five_eighths()
    assert rswalk.exact_distribution(group, f, 5) == {"0": "5/8", "1": "3/8"}
    assert rswalk.brute_force_distribution(group, f, 4) == {"0": "5/8", "1": "3/8"}
    assert rswalk.tv_distance_to_uniform(group, f, 6) == "1/8"

    stats = rswalk.monte_carlo_walk("su2-g", 12, samples=20000, seed=5)
    assert stats["max_unitarity_residual"] <= 1e-10
    assert stats["overlap_ks"] < 0.02

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
