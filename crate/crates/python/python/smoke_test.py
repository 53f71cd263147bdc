"""Smoke test for the pyspinqnd extension module."""

import math

import pyspinqnd as sq


def main():
    kappa = sq.PhysicalParams.yb171().kappa()
    assert abs(abs(kappa) - 0.63) < 0.02, kappa
    assert sq.PhysicalParams.yb171().replace(delta0=0.0).kappa() == 0.0

    k = 0.63
    assert abs(sq.v_pm(k, 0.0, "+") - 0.89690) < 1e-5
    assert abs(sq.v_pm(k, math.pi, "+") - 0.5) < 1e-12
    assert abs(sq.g_opt(k) - 0.28413) < 1e-5
    assert abs(sq.squeezing_db(k, 0.0) - 1.451) < 1e-3
    assert 0.1 < sq.squeezing_db(k, 0.0, 0.067) < 1.5

    state = sq.GaussianState().apply_faraday(1, k)
    assert abs(state.variance("S1_y") - sq.v1(k)) < 1e-12
    cond = state.condition_on("S1_y", 0.3)
    assert cond.variance("J_z") < state.variance("J_z")
    ev = sq.protocol_variances(k, 0.4)
    assert abs(ev["v_cond"] - sq.v_cond(k, 0.4)) < 1e-9

    run = sq.sweep(k, [0.0, math.pi / 2, math.pi], 2000, seed=1)
    assert len(run["squeezed"]) == 3 and len(run["coherent"]) == 3
    assert run["coherent"][0]["v_cond"] is None
    assert abs(run["global_g"] - sq.g_opt(k)) < 0.1

    exact = sq.exact_protocol_stats(8, 8, 0.3, 0.0)
    assert abs(exact["v1"] - sq.v1(0.3)) / sq.v1(0.3) < 0.1

    print("pyspinqnd smoke test ok")


if __name__ == "__main__":
    main()
