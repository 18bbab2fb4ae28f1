// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tempreg/field.hpp"

using namespace tempreg;

TEST_SUITE("field") {

TEST_CASE("exp_velocity of zero is the identity map") {
    const VelocityField v({8, 8, 8}, {1, 1, 1});
    const DisplacementField d = exp_velocity(v);
    for (const float x : d.data) CHECK(x == 0.0f);
}

TEST_CASE("exp_velocity of a constant field is the same translation") {
    const VelocityField v = test::constant_velocity({10, 9, 8}, {3.0, 0.0, 0.0});
    const DisplacementField d = exp_velocity(v);
    for (int z = 1; z < 7; ++z) {
        for (int y = 1; y < 8; ++y) {
            for (int x = 1; x < 9; ++x) {
                const Vec3 got = d.at(x, y, z);
                CHECK(got.x == doctest::Approx(3.0).epsilon(1e-6));
                CHECK(got.y == doctest::Approx(0.0).scale(1.0));
                CHECK(got.z == doctest::Approx(0.0).scale(1.0));
            }
        }
    }
}

TEST_CASE("exp_velocity validates its inputs") {
    VelocityField v({6, 6, 6}, {1, 1, 1});
    CHECK_THROWS_AS(exp_velocity(v, 0), std::invalid_argument);
    v.data[5] = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(exp_velocity(v), DataError);
}

TEST_CASE("exp inverse consistency on smooth random fields") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const VelocityField v = test::random_smooth_velocity({16, 16, 16}, 2.0, 2.5, seed);
        const DisplacementField fwd = exp_velocity(v);
        const DisplacementField bwd = exp_velocity(negated(v));
        const DisplacementField round = compose(fwd, bwd);
        CHECK(test::mean_interior_magnitude(round, 2) < 0.1);
    }
}

TEST_CASE("compose has the zero field as identity element") {
    const VelocityField v = test::random_smooth_velocity({12, 12, 12}, 3.0, 2.0, 42);
    DisplacementField d(v.dims, v.spacing);
    d.data = v.data;
    const DisplacementField zero(v.dims, v.spacing);
    const DisplacementField left = compose(zero, d);
    const DisplacementField right = compose(d, zero);
    for (std::size_t i = 0; i < d.data.size(); ++i) {
        CHECK(left.data[i] == d.data[i]);
        CHECK(right.data[i] == d.data[i]);
    }
}

TEST_CASE("compose adds constant translations in the interior") {
    const Dims3 dims{10, 10, 10};
    const DisplacementField t1 = test::constant_displacement(dims, {1.5, -0.5, 0.25});
    const DisplacementField t2 = test::constant_displacement(dims, {-0.75, 1.0, 0.5});
    const DisplacementField r = compose(t2, t1);
    // pointwise oracle: r(x) = t1 + t2 everywhere (clamped sampling of a
    // constant field is still the constant)
    for (int z = 0; z < dims.nz; ++z) {
        for (int y = 0; y < dims.ny; ++y) {
            for (int x = 0; x < dims.nx; ++x) {
                const Vec3 got = r.at(x, y, z);
                CHECK(got.x == doctest::Approx(0.75).epsilon(1e-6));
                CHECK(got.y == doctest::Approx(0.5).epsilon(1e-6));
                CHECK(got.z == doctest::Approx(0.75).epsilon(1e-6));
            }
        }
    }
    CHECK_THROWS_AS(compose(t1, test::constant_displacement({9, 10, 10}, {0, 0, 0})),
                    std::invalid_argument);
}

TEST_CASE("compose is associative within interpolation tolerance") {
    const Dims3 dims{14, 14, 14};
    auto to_disp = [](const VelocityField& v) {
        DisplacementField d(v.dims, v.spacing);
        d.data = v.data;
        return d;
    };
    const DisplacementField a = to_disp(test::random_smooth_velocity(dims, 1.5, 2.5, 100));
    const DisplacementField b = to_disp(test::random_smooth_velocity(dims, 1.5, 2.5, 101));
    const DisplacementField c = to_disp(test::random_smooth_velocity(dims, 1.5, 2.5, 102));
    const DisplacementField left = compose(compose(a, b), c);
    const DisplacementField right = compose(a, compose(b, c));
    double acc = 0.0;
    std::size_t n = 0;
    for (int z = 2; z < dims.nz - 2; ++z) {
        for (int y = 2; y < dims.ny - 2; ++y) {
            for (int x = 2; x < dims.nx - 2; ++x) {
                acc += (left.at(x, y, z) - right.at(x, y, z)).norm();
                ++n;
            }
        }
    }
    CHECK(acc / n < 0.05);
}

TEST_CASE("invert recovers the zero field and constant translations") {
    const Dims3 dims{9, 9, 9};
    const DisplacementField zero(dims, {1, 1, 1});
    const DisplacementField zi = invert(zero, 10, 1e-4);
    for (const float v : zi.data) CHECK(v == doctest::Approx(0.0));

    const DisplacementField t = test::constant_displacement(dims, {1.25, -0.5, 2.0});
    const DisplacementField ti = invert(t, 30, 1e-4);
    for (int z = 0; z < dims.nz; ++z) {
        for (int y = 0; y < dims.ny; ++y) {
            for (int x = 0; x < dims.nx; ++x) {
                const Vec3 got = ti.at(x, y, z);
                CHECK(got.x == doctest::Approx(-1.25).epsilon(1e-3));
                CHECK(got.y == doctest::Approx(0.5).epsilon(1e-3));
                CHECK(got.z == doctest::Approx(-2.0).epsilon(1e-3));
            }
        }
    }
}

TEST_CASE("invert agrees with exp of the negated velocity") {
    const VelocityField v = test::random_smooth_velocity({16, 16, 16}, 1.5, 3.0, 77);
    const DisplacementField fwd = exp_velocity(v);
    const DisplacementField inv_fixed_point = invert(fwd, 60, 1e-3);
    const DisplacementField inv_exp = exp_velocity(negated(v));
    double acc = 0.0;
    std::size_t n = 0;
    for (int z = 2; z < 14; ++z) {
        for (int y = 2; y < 14; ++y) {
            for (int x = 2; x < 14; ++x) {
                acc += (inv_fixed_point.at(x, y, z) - inv_exp.at(x, y, z)).norm();
                ++n;
            }
        }
    }
    CHECK(acc / n < 0.1);

    const DisplacementField round = compose(fwd, inv_fixed_point);
    CHECK(test::mean_interior_magnitude(round, 2) < 2e-3);
}

TEST_CASE("invert reports non-convergence with the residual") {
    // An alternating +/-3.5 voxel displacement folds the domain; the fixed
    // point oscillates between 0 and -3.5 instead of converging.
    const Dims3 dims{8, 8, 8};
    DisplacementField d(dims, {1, 1, 1});
    for (int z = 0; z < 8; ++z)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) d.set(x, y, z, {x % 2 ? -3.5 : 3.5, 0.0, 0.0});
    CHECK_THROWS_AS(invert(d, 5, 1e-6), ConvergenceError);
    try {
        invert(d, 5, 1e-6);
    } catch (const ConvergenceError& e) {
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("jacobian_determinant is one for the identity and 1.331 under 10% dilation") {
    const Dims3 dims{10, 10, 10};
    const DisplacementField zero(dims, {1, 1, 1});
    const Volume3 jz = jacobian_determinant(zero);
    for (const float v : jz.data) CHECK(v == doctest::Approx(1.0));

    DisplacementField dilation(dims, {1, 1, 1});
    for (int z = 0; z < 10; ++z)
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 10; ++x) dilation.set(x, y, z, {0.1 * x, 0.1 * y, 0.1 * z});
    const Volume3 jd = jacobian_determinant(dilation);
    for (int z = 1; z < 9; ++z)
        for (int y = 1; y < 9; ++y)
            for (int x = 1; x < 9; ++x)
                CHECK(jd.at(x, y, z) == doctest::Approx(1.331).epsilon(1e-5));
}

TEST_CASE("exp_velocity keeps the Jacobian positive for smooth fields") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const double mag = 0.5 + 0.2 * static_cast<double>(seed);
        const VelocityField v = test::random_smooth_velocity({12, 12, 12}, mag, 2.5, seed);
        CHECK(min_jacobian_determinant(exp_velocity(v)) > 0.0);
    }
}

TEST_CASE("field_sq_norm matches an independent accumulation") {
    const Dims3 dims{7, 6, 5};
    CHECK(field_sq_norm(DisplacementField(dims, {1, 1, 1})) == 0.0);
    CHECK(field_sq_norm(test::constant_displacement(dims, {1, 0, 0})) ==
          doctest::Approx(1.0));

    const VelocityField v = test::random_smooth_velocity(dims, 3.0, 1.5, 5);
    double acc = 0.0;
    for (int z = 0; z < dims.nz; ++z)
        for (int y = 0; y < dims.ny; ++y)
            for (int x = 0; x < dims.nx; ++x) acc += v.at(x, y, z).sq_norm();
    CHECK(field_sq_norm(v) == doctest::Approx(acc / dims.voxel_count()).epsilon(1e-6));
}

TEST_CASE("smooth_field is component-wise Gaussian smoothing") {
    const Dims3 dims{9, 9, 9};
    VelocityField v(dims, {1, 1, 1});
    v.set(4, 4, 4, {1.0, 0.0, -2.0});
    const VelocityField s = smooth_field(v, 1.0);

    Volume3 ix(dims, {1, 1, 1});
    ix.at(4, 4, 4) = 1.0f;
    const Volume3 sx = gaussian_smooth(ix, 1.0);
    Volume3 iz(dims, {1, 1, 1});
    iz.at(4, 4, 4) = -2.0f;
    const Volume3 sz = gaussian_smooth(iz, 1.0);
    for (int z = 0; z < 9; ++z) {
        for (int y = 0; y < 9; ++y) {
            for (int x = 0; x < 9; ++x) {
                const Vec3 got = s.at(x, y, z);
                CHECK(got.x == doctest::Approx(sx.at(x, y, z)));
                CHECK(got.y == doctest::Approx(0.0));
                CHECK(got.z == doctest::Approx(sz.at(x, y, z)));
            }
        }
    }

    const VelocityField unchanged = smooth_field(v, 0.0);
    CHECK(unchanged.data == v.data);
    const VelocityField c = smooth_field(test::constant_velocity(dims, {2, 3, 4}), 2.0);
    for (std::size_t i = 0; i < c.data.size(); i += 3) {
        CHECK(c.data[i] == doctest::Approx(2.0).epsilon(1e-6));
    }
    CHECK_THROWS_AS(smooth_field(v, -1.0), std::invalid_argument);
}

TEST_CASE("exp is additive in scale for small smooth fields") {
    const VelocityField v = test::random_smooth_velocity({14, 14, 14}, 3.0, 3.0, 8);
    for (const double a : {0.3, 0.5}) {
        const double b = 1.0 - a;
        VelocityField va = v, vb = v, vs = v;
        for (float& x : va.data) x = static_cast<float>(x * a);
        for (float& x : vb.data) x = static_cast<float>(x * b);
        const DisplacementField whole = exp_velocity(vs);
        const DisplacementField split = compose(exp_velocity(va), exp_velocity(vb));
        double acc = 0.0;
        std::size_t n = 0;
        for (int z = 2; z < 12; ++z) {
            for (int y = 2; y < 12; ++y) {
                for (int x = 2; x < 12; ++x) {
                    acc += (whole.at(x, y, z) - split.at(x, y, z)).norm();
                    ++n;
                }
            }
        }
        CHECK(acc / n < 0.1);
    }
}

TEST_CASE("resample_field preserves physical displacement across grids") {
    const VelocityField v = test::random_smooth_velocity({12, 12, 12}, 2.0, 3.0, 9);
    const VelocityField up = resample_field(v, {24, 24, 24}, {0.5, 0.5, 0.5});
    // voxel units double on the finer grid
    for (int z = 2; z < 10; ++z) {
        for (int y = 2; y < 10; ++y) {
            for (int x = 2; x < 10; ++x) {
                const Vec3 coarse = v.at(x, y, z);
                const Vec3 fine = up.at(2 * x, 2 * y, 2 * z);
                CHECK(fine.x == doctest::Approx(2.0 * coarse.x).epsilon(1e-4));
                CHECK(fine.y == doctest::Approx(2.0 * coarse.y).epsilon(1e-4));
                CHECK(fine.z == doctest::Approx(2.0 * coarse.z).epsilon(1e-4));
            }
        }
    }
}

}  // TEST_SUITE
