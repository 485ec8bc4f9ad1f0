#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hfloc/ccm.hpp"

using namespace hfloc;

namespace {

constexpr double kPi = std::numbers::pi;

CVec random_phases(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0, 2 * kPi);
    CVec beta(n);
    for (int i = 0; i < n; ++i) beta[i] = std::polar(1.0, ang(rng));
    return beta;
}

Eigen::MatrixXcd random_phase_rows(int c, int n, std::mt19937_64& rng) {
    Eigen::MatrixXcd rows(c, n);
    for (int i = 0; i < c; ++i) rows.row(i) = random_phases(n, rng).transpose();
    return rows;
}

std::vector<CrbUserModel> random_models(const RisConfig& cfg, int n_nf, int n_ff,
                                        std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0.3, kPi - 0.3);
    std::vector<CrbUserModel> models;
    for (int i = 0; i < n_nf + n_ff; ++i) {
        CVec h_a(cfg.size());
        for (int n = 0; n < cfg.size(); ++n) h_a[n] = complex_gaussian(1.0, rng);
        const Complex gain = std::polar(1.0, ang(rng));
        if (i < n_nf) {
            models.push_back(crb_user_model_nf(SphericalPoint(1.0, ang(rng), ang(rng)),
                                               gain, h_a, cfg, 1.0));
        } else {
            models.push_back(crb_user_model_ff(ang(rng), ang(rng), gain, h_a, cfg, 1.0));
        }
    }
    return models;
}

}  // namespace

TEST_CASE("euclidean gradient matches the Wirtinger finite-difference oracle") {
    const RisConfig cfg = RisConfig::uniform(4, 4, 0.03, 0.06);
    std::mt19937_64 rng(71);
    const double delta = 1e-6;
    const double sigma2 = 0.4;
    int config = 0;
    for (auto [n_nf, n_ff] : {std::pair{2, 0}, std::pair{0, 2}, std::pair{1, 1}}) {
        for (int rep = 0; rep < 7; ++rep, ++config) {
            const auto models = random_models(cfg, n_nf, n_ff, rng);
            const Eigen::MatrixXcd history = random_phase_rows(4, cfg.size(), rng);
            const CrbPhaseObjective obj(models, history, CrbWeights{}, sigma2);
            const CVec beta = random_phases(cfg.size(), rng);
            const CVec grad = obj.euclidean_gradient(beta);
            // Raw Euclidean perturbations along the real and imaginary axes,
            // no retraction: df/dbeta* = (df/dRe + j df/dIm) / 2, and the
            // reported gradient is twice that conjugate derivative.
            CVec fd(cfg.size());
            for (int n = 0; n < cfg.size(); ++n) {
                CVec bp = beta, bm = beta;
                bp[n] += delta;
                bm[n] -= delta;
                const double d_re = (obj.value(bp) - obj.value(bm)) / (2 * delta);
                bp = beta;
                bm = beta;
                bp[n] += Complex(0, delta);
                bm[n] -= Complex(0, delta);
                const double d_im = (obj.value(bp) - obj.value(bm)) / (2 * delta);
                fd[n] = Complex(d_re, d_im);
            }
            CHECK((grad - fd).norm() / fd.norm() < 1e-4);
        }
    }
    CHECK(config == 21);
}

TEST_CASE("zero weights give a zero gradient and an immediate return") {
    const RisConfig cfg = RisConfig::uniform(4, 4, 0.03, 0.06);
    std::mt19937_64 rng(72);
    const auto models = random_models(cfg, 1, 1, rng);
    const Eigen::MatrixXcd history = random_phase_rows(3, cfg.size(), rng);
    const CrbWeights zero{0, 0, 0, 0, 0};
    const CrbPhaseObjective obj(models, history, zero, 0.5);
    const CVec beta = random_phases(cfg.size(), rng);
    CHECK(obj.euclidean_gradient(beta).norm() == 0.0);
    const CcmResult res = optimize_phase_shifts(obj, beta, CcmConfig{});
    CHECK((res.beta - beta).norm() == 0.0);
}

TEST_CASE("tangent projection") {
    std::mt19937_64 rng(73);
    const CVec beta = random_phases(6, rng);
    SUBCASE("radial component is removed entirely") {
        CHECK(tangent_project(beta, beta).norm() < 1e-12);
    }
    SUBCASE("output is tangent at beta") {
        for (int rep = 0; rep < 50; ++rep) {
            const CVec b = random_phases(6, rng);
            CVec v(6);
            for (int n = 0; n < 6; ++n) {
                v[n] = complex_gaussian(2.0, rng);
            }
            const CVec t = tangent_project(v, b);
            for (int n = 0; n < 6; ++n) {
                CHECK(std::abs((std::conj(t[n]) * b[n]).real()) < 1e-10);
            }
        }
    }
    SUBCASE("scalar case keeps only the imaginary part") {
        CVec b(1), v(1);
        b << Complex(1, 0);
        v << Complex(0.7, -1.3);
        const CVec t = tangent_project(v, b);
        CHECK(std::abs(t[0] - Complex(0, -1.3)) < 1e-14);
    }
}

TEST_CASE("tangent update and retraction") {
    std::mt19937_64 rng(74);
    const CVec beta = random_phases(4, rng);
    SUBCASE("zero step or zero direction is the identity") {
        CVec d(4);
        for (int n = 0; n < 4; ++n) d[n] = complex_gaussian(1.0, rng);
        CHECK((tangent_update(beta, d, 0.0) - beta).norm() == 0.0);
        CHECK((tangent_update(beta, CVec::Zero(4), 0.8) - beta).norm() == 0.0);
    }
    SUBCASE("scalar addition") {
        CVec b(1), d(1);
        b << Complex(1, 0);
        d << Complex(0, 2);
        const CVec u = tangent_update(b, d, 0.5);
        CHECK(std::abs(u[0] - Complex(1, 1)) < 1e-15);
    }
    SUBCASE("retraction examples") {
        CVec off(3);
        off << Complex(2, 0), Complex(1, 1), beta[0];
        const CVec on = retract(off);
        CHECK(std::abs(on[0] - Complex(1, 0)) < 1e-15);
        CHECK(std::abs(on[1] - Complex(1, 1) / std::sqrt(2.0)) < 1e-15);
        CHECK(std::abs(on[2] - beta[0]) < 1e-15);  // manifold points are fixed
        CHECK((on.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
    }
    SUBCASE("zero entry is rejected") {
        CVec off(2);
        off << Complex(1, 0), Complex(0, 0);
        CHECK_THROWS_AS(retract(off), std::domain_error);
    }
}

TEST_CASE("phase-shift optimization") {
    const RisConfig cfg = RisConfig::uniform(5, 5, 0.03, 0.06);
    std::mt19937_64 rng(75);
    SUBCASE("huge tolerance stops immediately at the initial point") {
        const auto models = random_models(cfg, 1, 0, rng);
        const Eigen::MatrixXcd history = random_phase_rows(4, cfg.size(), rng);
        const CVec beta = random_phases(cfg.size(), rng);
        CcmConfig ccm;
        ccm.rel_tolerance = 1e12;
        const CcmResult res =
            optimize_phase_shifts(models, history, beta, CrbWeights{}, 0.5, ccm);
        CHECK(res.final_objective <= res.initial_objective);
        CHECK(res.iterations <= 1);
    }
    SUBCASE("objective never increases over 100 seeded runs") {
        for (int seed = 0; seed < 100; ++seed) {
            std::mt19937_64 local(1000 + seed);
            const auto models = random_models(cfg, 1, 0, local);
            const Eigen::MatrixXcd history = random_phase_rows(4, cfg.size(), local);
            const CVec beta = random_phases(cfg.size(), local);
            CcmConfig ccm;
            ccm.max_iterations = 30;
            const CcmResult res =
                optimize_phase_shifts(models, history, beta, CrbWeights{}, 0.5, ccm);
            CHECK(!res.failed);
            CHECK(res.final_objective <= res.initial_objective * (1 + 1e-12));
            CHECK((res.beta.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("optimization reduces the objective on a typical instance") {
        const auto models = random_models(cfg, 1, 1, rng);
        const Eigen::MatrixXcd history = random_phase_rows(2, cfg.size(), rng);
        const CVec beta = random_phases(cfg.size(), rng);
        const CcmResult res =
            optimize_phase_shifts(models, history, beta, CrbWeights{}, 0.5, CcmConfig{});
        CHECK(res.final_objective < res.initial_objective);
    }
}
