"""Smoke test for the dirac_orbits extension module.

Build and install first:
    pip install maturin
    maturin develop --release -m crates/dirac-orbits-py/Cargo.toml
"""

import math

import dirac_orbits as do


def main():
    a1 = do.RootDatum("a1")
    assert a1.rank == 1 and a1.weyl_order == 2
    assert a1.weyl_dim([3]) == 4
    assert do.RootDatum("a2").weyl_dim([1, 1]) == 8

    ir = do.Irrep("a1", [2])
    assert ir.dim == 3
    assert ir.commutator_residual() < 1e-12

    cd = do.CompactDirac("a1", [1])
    assert cd.scalar_square_residual() < 1e-10
    gap, ker = cd.gap_and_kernel(cd.orbit_point())
    assert ker >= 1, (gap, ker)
    gap, ker = cd.gap_and_kernel([2 * v for v in cd.orbit_point()])
    assert ker == 0 and gap > 0.1

    x = [0.4, 0.2, -0.1]
    orb = cd.orbital_integral(x)
    trace = do.Irrep("a1", [1]).trace_exp(x).real
    closure = a1.a_hat([math.sqrt(sum(v * v for v in x))]) * orb["value"][0]
    assert abs(closure - trace) < 1e-8 * abs(trace), (closure, trace)

    ds = do.DSModel(2, 48)
    case = ds.spectral_case([0.0, 0.0, 0.0])
    assert case["certified"], case
    spec = ds.ds_spectrum(ds.orbit_point())
    assert spec["ker_dim"] == 1, spec

    try:
        do.rossman_check(2, 0.05)
    except ValueError as e:
        assert "guard" in str(e)
    else:
        raise AssertionError("narrow width was accepted")

    assert do.run_cli(["verify-dirac", "--lambda", "-1"]) == 2
    print("dirac_orbits smoke test ok, schema", do.SCHEMA_VERSION)


if __name__ == "__main__":
    main()
