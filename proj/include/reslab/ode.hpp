#pragma once
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace reslab {

struct StepFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dormand-Prince 5(4) with the standard 4th-order continuous extension.
// The caller drives it step by step; `dense(theta)` interpolates inside the
// last accepted step. Nonstiff smooth fields only.
struct Dopri5Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

class Dopri5 {
public:
    using Vec = std::vector<double>;
    using Field = std::function<void(double, const Vec&, Vec&)>;
    using Options = Dopri5Options;

    Dopri5(Field f, Vec y0, double t0, Options opt = Options{})
        : f_(std::move(f)), y_(std::move(y0)), t_(t0), opt_(opt) {
        const size_t n = y_.size();
        for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &yerr_, &ynew_})
            k->assign(n, 0.0);
        rc_.assign(5, Vec(n, 0.0));
        f_(t_, y_, k1_);
        h_ = opt.h_init;
    }

    double t() const { return t_; }
    double t_prev() const { return tprev_; }
    double h_last() const { return hlast_; }
    const Vec& y() const { return y_; }

    // state override (chart switch, manual correction); recomputes the slope
    void set_state(const Vec& y, double t) {
        y_ = y;
        t_ = t;
        f_(t_, y_, k1_);
    }

    // one accepted step toward direction sign(dir); throws StepFailure on underflow
    void step(double dir) {
        const size_t n = y_.size();
        long tries = 0;
        for (;;) {
            if (++tries > 200) throw StepFailure("no acceptable step at t=" + std::to_string(t_));
            double h = dir * std::min(std::abs(h_), opt_.h_max);
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t_)))
                throw StepFailure("step size underflow at t=" + std::to_string(t_));
            rk_stages(h);
            double err = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double sk = opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
                double e = yerr_[i] / sk;
                err += e * e;
            }
            err = std::sqrt(err / static_cast<double>(n));
            double fac = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-30, -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                prepare_dense(h);
                tprev_ = t_;
                hlast_ = h;
                t_ += h;
                y_ = ynew_;
                k1_ = k7_;  // FSAL
                h_ = std::abs(h) * fac;
                return;
            }
            h_ = std::abs(h) * fac;
        }
    }

    // interpolant on the last accepted step, theta in [0,1]
    void dense(double theta, Vec& out) const {
        const size_t n = out.size();
        double th1 = 1.0 - theta;
        for (size_t i = 0; i < n; ++i)
            out[i] = rc_[0][i] +
                     theta * (rc_[1][i] + th1 * (rc_[2][i] + theta * (rc_[3][i] + th1 * rc_[4][i])));
    }
    Vec dense(double theta) const {
        Vec out(y_.size());
        dense(theta, out);
        return out;
    }

private:
    void rk_stages(double h) {
        const size_t n = y_.size();
        auto comb = [&](Vec& out, std::initializer_list<std::pair<double, const Vec*>> terms) {
            for (size_t i = 0; i < n; ++i) {
                double s = y_[i];
                for (const auto& [c, v] : terms) s += h * c * (*v)[i];
                out[i] = s;
            }
        };
        comb(ytmp_, {{1.0 / 5, &k1_}});
        f_(t_ + h / 5, ytmp_, k2_);
        comb(ytmp_, {{3.0 / 40, &k1_}, {9.0 / 40, &k2_}});
        f_(t_ + 3 * h / 10, ytmp_, k3_);
        comb(ytmp_, {{44.0 / 45, &k1_}, {-56.0 / 15, &k2_}, {32.0 / 9, &k3_}});
        f_(t_ + 4 * h / 5, ytmp_, k4_);
        comb(ytmp_, {{19372.0 / 6561, &k1_},
                     {-25360.0 / 2187, &k2_},
                     {64448.0 / 6561, &k3_},
                     {-212.0 / 729, &k4_}});
        f_(t_ + 8 * h / 9, ytmp_, k5_);
        comb(ytmp_, {{9017.0 / 3168, &k1_},
                     {-355.0 / 33, &k2_},
                     {46732.0 / 5247, &k3_},
                     {49.0 / 176, &k4_},
                     {-5103.0 / 18656, &k5_}});
        f_(t_ + h, ytmp_, k6_);
        comb(ynew_, {{35.0 / 384, &k1_},
                     {500.0 / 1113, &k3_},
                     {125.0 / 192, &k4_},
                     {-2187.0 / 6784, &k5_},
                     {11.0 / 84, &k6_}});
        f_(t_ + h, ynew_, k7_);
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        for (size_t i = 0; i < n; ++i)
            yerr_[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                            e7 * k7_[i]);
    }

    void prepare_dense(double h) {
        static constexpr double d1 = -12715105075.0 / 11282082432.0,
                                d3 = 87487479700.0 / 32700410799.0,
                                d4 = -10690763975.0 / 1880347072.0,
                                d5 = 701980252875.0 / 199316789632.0,
                                d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
        const size_t n = y_.size();
        for (size_t i = 0; i < n; ++i) {
            double dy = ynew_[i] - y_[i];
            double bspl = h * k1_[i] - dy;
            rc_[0][i] = y_[i];
            rc_[1][i] = dy;
            rc_[2][i] = bspl;
            rc_[3][i] = dy - h * k7_[i] - bspl;
            rc_[4][i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] +
                             d7 * k7_[i]);
        }
    }

    Field f_;
    Vec y_, k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, yerr_, ynew_;
    std::vector<Vec> rc_;
    double t_ = 0, tprev_ = 0, h_ = 1e-3, hlast_ = 0;
    Options opt_;
};

// Classic fixed-step RK4, templated so the horseshoe shooting can run in
// __float128 (polynomial field, no transcendentals needed).
template <class Real, class F>
void rk4_fixed(F&& field, std::vector<Real>& y, Real t0, Real t1, Real h) {
    const size_t n = y.size();
    std::vector<Real> k1(n), k2(n), k3(n), k4(n), tmp(n);
    Real t = t0;
    while (t < t1) {
        Real hh = std::min(h, t1 - t);
        field(t, y, k1);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + hh / 2 * k1[i];
        field(t + hh / 2, tmp, k2);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + hh / 2 * k2[i];
        field(t + hh / 2, tmp, k3);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + hh * k3[i];
        field(t + hh, tmp, k4);
        for (size_t i = 0; i < n; ++i) y[i] += hh / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t += hh;
    }
}

}  // namespace reslab
