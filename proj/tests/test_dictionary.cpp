#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hfloc/dictionary.hpp"

using namespace hfloc;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("nf grid sampling") {
    SUBCASE("single-element panel has no near field") {
        const RisConfig cfg = RisConfig::uniform(1, 1, 0.03, 0.06);
        CHECK(sample_nf_grid(cfg, 0.25, 0.25, 4, 4).empty());
    }
    SUBCASE("every sample classifies as near-field") {
        const RisConfig cfg = RisConfig::uniform(10, 10, 0.03, 0.06);
        const auto grid = sample_nf_grid(cfg, 0.25, 0.25, 10, 10);
        REQUIRE(!grid.empty());
        for (const auto& p : grid) {
            CHECK(classify_region(p, cfg) == RegionTag::NearField);
        }
    }
    SUBCASE("near-normal angular cell extends to roughly 4.9 m") {
        const RisConfig cfg = RisConfig::uniform(10, 10, 0.03, 0.06);
        const auto grid = sample_nf_grid(cfg, 0.25, 0.25, 10, 10);
        // Cell closest to the panel normal: theta = 4.5*pi/10, phi = 0.5*pi/10.
        const double theta = 4.5 * kPi / 10, phi = 0.5 * kPi / 10;
        int count = 0;
        double max_r = 0.0;
        for (const auto& p : grid) {
            if (std::abs(p.polar - theta) < 1e-12 && std::abs(p.azimuth - phi) < 1e-12) {
                ++count;
                max_r = std::max(max_r, p.range);
            }
        }
        CHECK(count >= 17);
        CHECK(count <= 20);
        CHECK(max_r > 4.0);
        CHECK(max_r < 5.0);
    }
    SUBCASE("rejects invalid spacing") {
        const RisConfig cfg = RisConfig::uniform(4, 4, 0.03, 0.06);
        CHECK_THROWS_AS(sample_nf_grid(cfg, 0.0, 0.25, 4, 4), std::invalid_argument);
        CHECK_THROWS_AS(sample_nf_grid(cfg, 0.25, -0.1, 4, 4), std::invalid_argument);
        CHECK_THROWS_AS(sample_nf_grid(cfg, 0.25, 0.25, 0, 4), std::invalid_argument);
    }
}

TEST_CASE("ff grid sampling") {
    SUBCASE("1x1 lattice is the single cell midpoint") {
        const auto grid = sample_ff_grid(1, 1);
        REQUIRE(grid.size() == 1);
        CHECK(grid[0].first == doctest::Approx(kPi / 2));
        CHECK(grid[0].second == doctest::Approx(kPi / 2));
    }
    SUBCASE("10x10 lattice has 100 pairs") {
        CHECK(sample_ff_grid(10, 10).size() == 100);
    }
    SUBCASE("angular lattice shared with the NF grid") {
        const RisConfig cfg = RisConfig::uniform(10, 10, 0.03, 0.06);
        const auto nf = sample_nf_grid(cfg, 0.25, 0.25, 10, 10);
        const auto ff = sample_ff_grid(10, 10);
        for (const auto& p : nf) {
            bool found = false;
            for (const auto& [theta, phi] : ff) {
                if (std::abs(p.polar - theta) < 1e-12 && std::abs(p.azimuth - phi) < 1e-12) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
        }
    }
}

TEST_CASE("atom channel matrix") {
    const RisConfig cfg = RisConfig::uniform(10, 10, 0.03, 0.06);
    const auto nf = sample_nf_grid(cfg, 0.25, 0.25, 6, 6);
    const auto ff = sample_ff_grid(6, 6);
    const AtomDictionary dict = build_atom_channels(nf, ff, cfg);

    SUBCASE("layout and counts") {
        CHECK(dict.near_count == static_cast<Eigen::Index>(nf.size()));
        CHECK(dict.far_count == 36);
        CHECK(dict.size() == dict.near_count + dict.far_count);
        CHECK(dict.atoms.rows() == cfg.size());
    }
    SUBCASE("unit-modulus entries") {
        CHECK((dict.atoms.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("NF columns equal the steering vectors bitwise") {
        for (std::size_t i = 0; i < nf.size(); ++i) {
            CHECK((dict.atoms.col(static_cast<Eigen::Index>(i)) - nf_steering(nf[i], cfg))
                      .norm() == 0.0);
        }
    }
    SUBCASE("FF atoms distinct except for the mirror-angle ambiguity") {
        // A planar panel only observes (cos(theta), sin(theta) sin(phi)), so
        // the angle pairs (theta, phi) and (theta, pi - phi) produce the same
        // plane-wave atom. All other pairs must be distinguishable.
        const auto far = dict.atoms.rightCols(dict.far_count);
        for (Eigen::Index i = 0; i < dict.far_count; ++i) {
            const auto& li = dict.locations[static_cast<std::size_t>(dict.near_count + i)];
            for (Eigen::Index j = i + 1; j < dict.far_count; ++j) {
                const auto& lj =
                    dict.locations[static_cast<std::size_t>(dict.near_count + j)];
                const bool mirror =
                    std::abs(li.polar - lj.polar) < 1e-12 &&
                    std::abs(std::sin(li.azimuth) - std::sin(lj.azimuth)) < 1e-12;
                const double coh = std::abs((far.col(i).adjoint() * far.col(j))(0)) /
                                   (far.col(i).norm() * far.col(j).norm());
                if (mirror) {
                    CHECK(coh > 1.0 - 1e-12);
                } else {
                    CHECK(coh < 1.0 - 1e-9);
                }
            }
        }
    }
    SUBCASE("both grids empty is an error") {
        CHECK_THROWS_AS(build_atom_channels({}, {}, cfg), std::invalid_argument);
    }
}

TEST_CASE("atom signals") {
    SUBCASE("identity weighting gives column sums") {
        Eigen::MatrixXcd atoms(2, 3);
        atoms << Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                 Complex(0, -1), Complex(1, 0), Complex(0, 1);
        const Eigen::MatrixXcd lambda =
            build_atom_signals(Eigen::MatrixXcd::Ones(1, 2), CVec::Ones(2), atoms, 1.0);
        REQUIRE(lambda.rows() == 1);
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(lambda(0, j) - atoms.col(j).sum()) < 1e-14);
        }
    }
    SUBCASE("zero symbol gives the zero matrix") {
        Eigen::MatrixXcd atoms = Eigen::MatrixXcd::Random(3, 4);
        const Eigen::MatrixXcd lambda = build_atom_signals(
            Eigen::MatrixXcd::Ones(2, 3), CVec::Random(3), atoms, 0.0);
        CHECK(lambda.norm() == 0.0);
    }
    SUBCASE("hand-expanded 2x2 product") {
        Eigen::MatrixXcd phases(2, 2);
        phases << std::polar(1.0, 0.2), std::polar(1.0, -0.7),
                  std::polar(1.0, 1.4), std::polar(1.0, 2.9);
        CVec h_a(2);
        h_a << Complex(0.5, 0.3), Complex(-0.2, 1.1);
        Eigen::MatrixXcd atoms(2, 2);
        atoms << Complex(1, 0), Complex(0, 1), Complex(0.6, -0.8), Complex(-1, 0);
        const Complex s(0.9, -0.4);
        const Eigen::MatrixXcd lambda = build_atom_signals(phases, h_a, atoms, s);
        for (int c = 0; c < 2; ++c) {
            for (int m = 0; m < 2; ++m) {
                Complex expected = 0.0;
                for (int n = 0; n < 2; ++n) {
                    expected += phases(c, n) * h_a[n] * atoms(n, m);
                }
                expected *= s;
                CHECK(std::abs(lambda(c, m) - expected) < 1e-14);
            }
        }
    }
    SUBCASE("incremental row matches the batch build") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> ang(0, 2 * kPi);
        const RisConfig cfg = RisConfig::uniform(4, 4, 0.03, 0.06);
        const AtomDictionary dict = build_atom_dictionary(cfg, GridConfig{0.5, 0.5, 3, 3});
        Eigen::MatrixXcd phases(3, cfg.size());
        for (int c = 0; c < 3; ++c) {
            for (int n = 0; n < cfg.size(); ++n) phases(c, n) = std::polar(1.0, ang(rng));
        }
        CVec h_a(cfg.size());
        for (int n = 0; n < cfg.size(); ++n) {
            h_a[n] = Complex(ang(rng) - kPi, ang(rng) - kPi);
        }
        const Complex s(1.2, 0.1);
        const Eigen::MatrixXcd batch = build_atom_signals(phases, h_a, dict.atoms, s);
        for (int c = 0; c < 3; ++c) {
            const Eigen::RowVectorXcd row =
                atom_signal_row(phases.row(c).transpose(), h_a, dict.atoms, s);
            CHECK((row - batch.row(c)).norm() < 1e-12);
        }
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(build_atom_signals(Eigen::MatrixXcd::Ones(1, 3), CVec::Ones(2),
                                           Eigen::MatrixXcd::Ones(2, 2), 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("dictionary consistency for an on-grid direct-path user") {
    const RisConfig cfg = RisConfig::uniform(10, 10, 0.03, 0.06);
    const AtomDictionary dict = build_atom_dictionary(cfg, GridConfig{});
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ang(0, 2 * kPi);
    std::uniform_int_distribution<Eigen::Index> pick(0, dict.near_count - 1);

    for (int rep = 0; rep < 5; ++rep) {
        const Eigen::Index idx = pick(rng);
        const auto& loc = dict.locations[static_cast<std::size_t>(idx)];
        const Complex alpha = std::polar(1.3, ang(rng));
        CVec h_a(cfg.size());
        for (int n = 0; n < cfg.size(); ++n) h_a[n] = complex_gaussian(1.0, rng);
        const CVec h = cascaded_channel(
            h_a, alpha * nf_steering(SphericalPoint(loc.range, loc.polar, loc.azimuth), cfg));

        const int cycles = 6;
        Eigen::MatrixXcd phases(cycles, cfg.size());
        Eigen::VectorXcd g(cycles);
        const Complex s(0.8, 0.5);
        for (int c = 0; c < cycles; ++c) {
            for (int n = 0; n < cfg.size(); ++n) phases(c, n) = std::polar(1.0, ang(rng));
            g[c] = received_signal(phases.row(c).transpose(), h, s, 0.0, rng);
        }
        const Eigen::MatrixXcd lambda = build_atom_signals(phases, h_a, dict.atoms, s);
        CHECK((g - alpha * lambda.col(idx)).norm() < 1e-9 * g.norm());
    }
}
