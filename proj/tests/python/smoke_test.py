"""Smoke tests for the _qkdsim extension module."""

import math
import sys

import _qkdsim as q


def approx(a, b, tol=1e-9):
    assert abs(a - b) < tol, f"{a} != {b} (tol {tol})"


def test_circuit_and_engines():
    c = q.Circuit(2, 2)
    c.h(0).cnot(0, 1).measure_z(0, 0).measure_z(1, 1)
    assert len(c) == 4
    assert q.is_clifford(c)
    assert "CNOT 0 1" in str(c)

    dist = q.exact_distribution(c)
    approx(dist[0b00], 0.5)
    approx(dist[0b11], 0.5)

    bits = q.run_shot_bits(c, seed=1, stream=0)
    assert bits in (0b00, 0b11)

    det = q.Circuit(1, 1)
    det.prep_z(0).x(0).measure_z(0, 0)
    assert all(b == 1 for b in q.frame_sample_bits(det, 16, 3))

    rot = q.Circuit(1, 0)
    rot.ry(0, 0.3)
    assert not q.is_clifford(rot)


def test_qkd_and_attacks():
    records = q.run_bb84(2000, theta=math.pi / 2, seed=9)
    sifted = q.sift(records)
    assert 800 < len(sifted) < 1200
    value, std_err, n = q.correlation(sifted, "AB")
    want = math.cos(math.pi / 4)
    assert abs(value - want) < 4 * std_err + 0.05

    ab, ae = q.expected_pccm_correlations(1.0)
    approx(ab * ab + ae * ae, 1.0)
    approx(q.optimal_phi(math.pi / 4, 0.0), -math.pi / 4)


def test_codes_and_experiments():
    code = q.code_422()
    assert (code.n, code.k, code.d) == (4, 2, 2)
    assert str(code.stabilizers[0]) == "XXXX"
    enc = q.encoder_circuit(code)
    assert q.is_clifford(enc)

    steane = q.code_steane()
    assert len(steane.stabilizers) == 6
    assert q.lut_decode(0b101) == 5
    assert q.lut_decode(0) == -1

    acc, pre, post = q.analytic_422_bitflip(0.1)
    approx(pre, 0.18, 1e-12)

    acc_mc, flip1, flip2 = q.run_422(0.1, m=2, shots=50000, seed=4)
    assert abs(acc_mc - acc) < 0.01
    assert abs(flip1 - post) < 0.01

    exact = q.steane_postselected_flip_exact(0.03)
    assert 0 < exact < 1e-4

    px, py, pz = q.twirl_amplitude_damping(0.2)
    approx(px, 0.05, 1e-12)
    approx(pz, 0.0027864045, 1e-8)


def test_sidechannel():
    assert q.apply_bias_quench(3.0) < 0.01
    assert q.apply_bias_pump(10.0) > 0.99


def main():
    test_circuit_and_engines()
    test_qkd_and_attacks()
    test_codes_and_experiments()
    test_sidechannel()
    print("python smoke tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
