#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reslab/lambda_build.hpp"
#include "reslab/reduced_flow.hpp"
#include "reslab/rng.hpp"

using namespace reslab;
using doctest::Approx;

namespace {

ReducedModel beam_model(std::uint64_t seed = 1, double eps = -1.0, double delta = 0.0) {
    auto lam = build_beam_lambda(2, 0.2, seed);
    auto rc = reduced_coeffs(lam, EquationKind::beam());
    return ReducedModel(rc, eps, delta);
}

ReducedState random_state(Rng& rng, int N) {
    std::vector<double> psi(N), K(N);
    for (int j = 0; j < N; ++j) {
        psi[j] = rng.uniform(-3.0, 3.0);
        K[j] = rng.uniform(0.1, 0.9);
    }
    return ReducedState::angular(psi, K);
}

}  // namespace

TEST_CASE("H values match the closed forms") {
    auto m = ReducedModel::bare(2);
    // K = 0 -> H = 0
    auto z0 = ReducedState::angular({0.7, -1.3}, {0.0, 0.0});
    CHECK(m.H(z0) == Approx(0.0).scale(1));
    // single active block at (0, 1/2): K(1-K)(1+2cos 0) = 3/4
    auto z1 = ReducedState::angular({0.0, 0.0}, {0.5, 0.0});
    CHECK(m.H(z1) == Approx(0.75));
}

TEST_CASE("saddles: energies and eigenvalues") {
    auto m0 = ReducedModel::bare(2);
    auto sp = saddle_point(m0, +1, 0);
    CHECK(sp.psi_star[0] == Approx(2 * M_PI / 3).epsilon(1e-14));
    CHECK(sp.eigenvalues[0] == Approx(std::sqrt(3.0)).epsilon(1e-10));
    CHECK(m0.H(sp.location) == Approx(0.0).scale(1));

    // perturbed: saddle energy on {K=0} is exactly 0 for every eps
    auto m = beam_model(2, 0.02);
    auto spe = saddle_point(m, -1, 0);
    CHECK(m.H(spe.location) == Approx(0.0).scale(1));
    // the located angle is a genuine equilibrium of the field
    std::vector<double> f;
    m.field(spe.location, f);
    for (double v : f) CHECK(std::abs(v) < 1e-13);

    // tuned Hartree instance: e^(0) and e^(1) on the same energy level
    auto lam = build_hartree_lambda(2, 7);
    EquationKind kind = EquationKind::hartree(0.05);
    Rng rng(13);
    auto modes = lam.modes_ordered();
    for (size_t i = 0; i < modes.size(); ++i)
        for (size_t j = i + 1; j < modes.size(); ++j)
            kind.gamma.set(modes[i] - modes[j], rng.uniform(-1.0, 1.0));
    tune_gamma_energy_matching(lam, kind);
    ReducedModel mh(reduced_coeffs(lam, kind));
    auto e1 = saddle_point(mh, +1, 1);
    CHECK(std::abs(mh.H(e1.location)) < 1e-10);
}

TEST_CASE("vector field: stationary directions and invariant hyperplanes") {
    auto m0 = ReducedModel::bare(2);
    // psi = Psi*: the psi-equation vanishes on that factor at eps = 0
    auto z = ReducedState::angular({2 * M_PI / 3, 0.4}, {0.33, 0.71});
    std::vector<double> f;
    m0.field(z, f);
    CHECK(std::abs(f[0]) < 1e-14);
    // K in {0,1}: K' = 0
    auto zb = ReducedState::angular({0.4, 1.1}, {0.0, 1.0});
    m0.field(zb, f);
    CHECK(f[1] == 0.0);
    CHECK(f[3] == 0.0);
}

TEST_CASE("gradient check against central differences, all charts") {
    auto m = beam_model(3, 0.01);
    Rng rng(4);
    std::vector<double> f, fp, fm;
    for (int trial = 0; trial < 30; ++trial) {
        auto z = random_state(rng, 2);
        if (trial % 3 == 1) z.to_chart(0, Chart::Lower);
        if (trial % 3 == 2) {
            z.to_chart(0, Chart::Upper);
            z.to_chart(1, Chart::Lower);
        }
        m.field(z, f);
        const double h = 1e-6;
        for (int j = 0; j < 2; ++j) {
            auto zp = z, zm = z;
            // finite differences of H give the symplectic-partner component
            zp.q[2 * j + 1] += h;
            zm.q[2 * j + 1] -= h;
            double dHdb = (m.H(zp) - m.H(zm)) / (2 * h);
            zp = z;
            zm = z;
            zp.q[2 * j] += h;
            zm.q[2 * j] -= h;
            double dHda = (m.H(zp) - m.H(zm)) / (2 * h);
            double expect_a, expect_b;
            switch (z.chart[j]) {
                case Chart::Angular:
                    expect_a = dHdb;
                    expect_b = -dHda;
                    break;
                case Chart::Lower:
                    expect_a = -0.5 * dHdb;
                    expect_b = 0.5 * dHda;
                    break;
                default:
                    expect_a = 0.5 * dHdb;
                    expect_b = -0.5 * dHda;
                    break;
            }
            double scale = std::max({1.0, std::abs(f[2 * j]), std::abs(f[2 * j + 1])});
            CHECK(std::abs(f[2 * j] - expect_a) / scale < 1e-6);
            CHECK(std::abs(f[2 * j + 1] - expect_b) / scale < 1e-6);
        }
    }
}

TEST_CASE("chart conversions invert and preserve H; flow pushes forward") {
    auto m = beam_model(5, 0.02);
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        auto z = random_state(rng, 2);
        double H0 = m.H(z);
        auto zl = z;
        zl.to_chart(0, Chart::Lower);
        zl.to_chart(1, Chart::Upper);
        CHECK(m.H(zl) == Approx(H0).epsilon(1e-12));
        auto back = zl.all_angular();
        for (int j = 0; j < 2; ++j) {
            CHECK(back.K(j) == Approx(z.K(j)).epsilon(1e-12));
            CHECK(std::abs(wrap_angle(back.psi(j) - z.psi(j))) < 1e-12);
        }
        // push-forward of the angular field through the chart map matches the
        // cartesian field (validates the +-1/2 symplectic factors)
        std::vector<double> fa, fc;
        m.field(z, fa);
        m.field(zl, fc);
        const double h = 1e-7;
        for (int comp = 0; comp < 4; ++comp) {
            auto zp = z, zm = z;
            for (int c = 0; c < 4; ++c) {
                zp.q[c] += h * fa[c];
                zm.q[c] -= h * fa[c];
            }
            auto zpl = zp, zml = zm;
            for (int j = 0; j < 2; ++j) {
                zpl.to_chart(j, zl.chart[j]);
                zml.to_chart(j, zl.chart[j]);
            }
            double push = (zpl.q[comp] - zml.q[comp]) / (2 * h);
            CHECK(std::abs(push - fc[comp]) < 1e-5 * std::max(1.0, std::abs(fc[comp])));
        }
    }
}

TEST_CASE("closed-form orbits satisfy the flow") {
    // heteroclinic of the unperturbed model
    auto m0 = ReducedModel::bare(2);
    const double s3 = std::sqrt(3.0);
    for (double tau : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
        auto z = heteroclinic_state(+1, {tau, tau + 0.7});
        std::vector<double> f;
        m0.field(z, f);
        for (int j = 0; j < 2; ++j) {
            double K = z.K(j);
            CHECK(std::abs(f[2 * j]) < 1e-12);                       // psi stationary
            CHECK(f[2 * j + 1] == Approx(s3 * K * (1 - K)).epsilon(1e-12));  // K' = sqrt3 K(1-K)
        }
    }
    // gamma_+(0,0)
    auto g0 = heteroclinic_state(+1, {0.0, 0.0});
    CHECK(g0.K(0) == Approx(0.5));
    CHECK(g0.psi(0) == Approx(2 * M_PI / 3));

    // delta-modified homoclinic solves the delta-model
    const double delta = 0.05;
    auto md = ReducedModel::bare(2, 0.0, delta);
    for (double t : {-4.0, -1.0, 0.0, 0.3, 2.5}) {
        auto z = modified_homoclinic_state({t, t - 0.4}, delta);
        std::vector<double> f;
        md.field(z, f);
        for (int j = 0; j < 2; ++j) {
            double tj = j == 0 ? t : t - 0.4;
            double psidot_closed = -(1.0 + 2.0 * std::cos(homoclinic_psi(tj)));
            CHECK(f[2 * j] == Approx(psidot_closed).epsilon(1e-12));
            CHECK(f[2 * j + 1] == Approx(homoclinic_dK(tj, delta)).epsilon(1e-11));
        }
    }
    CHECK(homoclinic_K(0.0, delta) == Approx(1.0 / (1.0 + delta / 3.0)).epsilon(1e-14));
    CHECK(homoclinic_psi(50.0) == Approx(-2 * M_PI / 3).epsilon(1e-8));
    CHECK(homoclinic_psi(-50.0) == Approx(2 * M_PI / 3).epsilon(1e-8));
    // connects e_+^(0) to e_-^(0)
    CHECK(homoclinic_K(50.0, delta) == Approx(0.0).scale(1).epsilon(1e-8));
}

TEST_CASE("integration: invariant subspace, energy drift, reversibility") {
    auto m = beam_model(1, 0.01);
    std::vector<double> psi{0.3, 0.0}, K{0.4, 0.0};
    auto z0 = ReducedState::angular(psi, K);
    IntegrateOptions opt;
    opt.tol = 1e-10;
    auto tr = integrate_reduced(m, z0, 0.0, 100.0, opt);
    for (const auto& s : tr.states) CHECK(std::abs(s.K(1)) < 1e-10);
    CHECK(tr.H_max_drift <= 100 * opt.tol * 100.0);

    // reversibility: Phi^{-t}(Ups z) = Ups(Phi^t z)
    auto z1 = ReducedState::angular({0.4, -0.9}, {0.35, 0.6});
    auto fwd = integrate_reduced(m, z1, 0.0, 20.0, opt);
    auto uz = fwd.back_state().reversed();
    auto bwd = integrate_reduced(m, uz, 0.0, 20.0, opt);
    auto end = bwd.back_state().all_angular();
    auto target = z1.reversed().all_angular();
    for (int j = 0; j < 2; ++j) {
        CHECK(end.K(j) == Approx(target.K(j)).epsilon(1e-7));
        CHECK(std::abs(wrap_angle(end.psi(j) - target.psi(j))) < 1e-6);
    }
}

TEST_CASE("chart-independence of the flow") {
    auto m = beam_model(1, 0.01);
    auto z0 = ReducedState::angular({0.3, 2.0}, {0.5, 0.3});
    IntegrateOptions narrow;  // effectively always angular
    narrow.margin = 1e-3;
    narrow.tol = 1e-11;
    IntegrateOptions wide;  // cartesian charts engaged over a wide band
    wide.margin = 0.45;
    wide.tol = 1e-11;
    auto t1 = integrate_reduced(m, z0, 0.0, 30.0, narrow);
    auto t2 = integrate_reduced(m, z0, 0.0, 30.0, wide);
    auto a = t1.back_state().all_angular();
    auto b = t2.back_state().all_angular();
    for (int j = 0; j < 2; ++j) {
        CHECK(a.K(j) == Approx(b.K(j)).epsilon(1e-8));
        CHECK(std::abs(wrap_angle(a.psi(j) - b.psi(j))) < 1e-7);
    }
}

TEST_CASE("periodic orbits: period monotone, energy constant, shrink to center") {
    auto m = ReducedModel::bare(2);
    double Tprev = 0;
    for (double h : {0.1, 0.05, 0.025}) {
        auto orb = periodic_orbit(m, h, 0);
        CHECK(orb.samples.size() >= 512);
        if (Tprev > 0) CHECK(orb.T > Tprev);  // T_{h/2} > T_h
        Tprev = std::max(Tprev, orb.T);
        // actually compare increasing as h decreases
        // energy constant along samples
        for (size_t i = 0; i < orb.samples.size(); i += 37) {
            auto z = ReducedState::angular({orb.samples[i][0], 0.0}, {orb.samples[i][1], 0.0});
            z.to_chart(1, Chart::Lower);
            CHECK(m.H(z) == Approx(h).epsilon(1e-9));
        }
    }
    // ordering: T(0.1) < T(0.05) < T(0.025)
    auto t1 = periodic_orbit(m, 0.1, 0).T;
    auto t2 = periodic_orbit(m, 0.05, 0).T;
    auto t3 = periodic_orbit(m, 0.025, 0).T;
    CHECK(t2 > t1);
    CHECK(t3 > t2);
    // h -> 3/4: shrink to the elliptic point (0, 1/2)
    auto tiny = periodic_orbit(m, 0.7499, 0, 600);
    for (const auto& s : tiny.samples) {
        CHECK(std::abs(s[0]) < 0.05);
        CHECK(std::abs(s[1] - 0.5) < 0.05);
    }
    CHECK(tiny.T == Approx(2 * M_PI / std::sqrt(3.0)).epsilon(1e-3));
    CHECK_THROWS_AS(periodic_orbit(m, 0.76, 0), EnergyOutOfRange);
}
