#include "reslab/reduced_flow.hpp"

#include <cmath>

namespace reslab {

namespace {

void apply_chart_policy(const ReducedModel& m, ReducedState& z, const IntegrateOptions& opt) {
    for (int j = 0; j < z.blocks(); ++j) {
        double K = z.K(j);
        switch (z.chart[j]) {
            case Chart::Angular:
                if (K < opt.margin)
                    z.to_chart(j, Chart::Lower);
                else if (K > 1.0 - opt.margin)
                    z.to_chart(j, Chart::Upper);
                break;
            case Chart::Lower:
                if (K > opt.margin + opt.hysteresis && K < 1.0 - opt.margin - opt.hysteresis)
                    z.to_chart(j, Chart::Angular);
                else if (K > 1.0 - opt.margin)
                    z.to_chart(j, Chart::Upper);
                break;
            case Chart::Upper:
                if (K < 1.0 - opt.margin - opt.hysteresis && K > opt.margin + opt.hysteresis)
                    z.to_chart(j, Chart::Angular);
                else if (K < opt.margin)
                    z.to_chart(j, Chart::Lower);
                break;
        }
    }
}

}  // namespace

Trajectory integrate_reduced(const ReducedModel& m, const ReducedState& z0, double t0, double t1,
                             const IntegrateOptions& opt, const std::vector<EventSpec>& events) {
    Trajectory traj;
    ReducedState z = z0;
    apply_chart_policy(m, z, opt);
    const double dir = t1 >= t0 ? 1.0 : -1.0;

    // charts are frozen during a step; the field closure reads them from `z`
    auto field = [&](double, const Dopri5::Vec& q, Dopri5::Vec& dq) {
        ReducedState tmp = z;
        tmp.q = q;
        m.field(tmp, dq);
    };
    Dopri5::Options oopt;
    oopt.rtol = opt.tol;
    oopt.atol = opt.tol * 1e-2;
    oopt.h_init = opt.h_init;
    Dopri5 stepper(field, z.q, t0, oopt);

    traj.H_start = m.H(z);
    auto record = [&](double t, const ReducedState& s) {
        traj.t.push_back(t);
        traj.states.push_back(s);
        traj.H_max_drift = std::max(traj.H_max_drift, std::abs(m.H(s) - traj.H_start));
    };
    if (opt.record) record(t0, z);

    std::vector<double> gprev(events.size());
    auto eval_events = [&](double t, const ReducedState& s, std::vector<double>& out) {
        for (size_t i = 0; i < events.size(); ++i) out[i] = events[i].g(t, s);
    };
    std::vector<double> gcur(events.size());
    eval_events(t0, z, gprev);

    double next_record = t0 + dir * opt.record_dt;
    while (dir * (t1 - stepper.t()) > 1e-14 * std::max(1.0, std::abs(t1))) {
        stepper.step(dir);
        const double ta = stepper.t_prev();
        const double h_full = stepper.h_last();
        double tb = stepper.t();
        if (dir * (tb - t1) > 0) {  // overshot: clip to t1 via the interpolant
            tb = t1;
            auto yc = stepper.dense((t1 - ta) / h_full);
            stepper.set_state(yc, t1);
        }
        z.q = stepper.y();

        // dense state at absolute time within [ta, tb]
        auto state_at = [&](double t) {
            ReducedState zs = z;
            zs.q = stepper.dense((t - ta) / h_full);
            return zs;
        };

        bool stop = false;
        if (!events.empty()) {
            for (size_t i = 0; i < events.size() && !stop; ++i) {
                double g1 = events[i].g(tb, z);
                double g0 = gprev[i];
                bool crossing = g0 != 0.0 &&
                                (((g0 < 0 && g1 >= 0) && events[i].direction >= 0) ||
                                 ((g0 > 0 && g1 <= 0) && events[i].direction <= 0));
                if (crossing) {
                    double lo = ta, hi = tb;
                    for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi));
                         ++it) {
                        double mid = 0.5 * (lo + hi);
                        double gm = events[i].g(mid, state_at(mid));
                        if ((g0 < 0) == (gm < 0))
                            lo = mid;
                        else
                            hi = mid;
                    }
                    EventHit hit;
                    hit.which = static_cast<int>(i);
                    hit.t = 0.5 * (lo + hi);
                    hit.state = state_at(hit.t);
                    traj.events.push_back(hit);
                    if (events[i].terminal) {
                        stepper.set_state(hit.state.q, hit.t);
                        z.q = hit.state.q;
                        tb = hit.t;
                        stop = true;
                        traj.stopped_by_event = true;
                    }
                }
                gprev[i] = g1;
            }
        }

        if (opt.record) {
            if (opt.record_dt <= 0.0) {
                record(stepper.t(), z);
            } else {
                while (dir * (tb - next_record) >= 0) {
                    record(next_record, state_at(next_record));
                    next_record += dir * opt.record_dt;
                }
            }
        }
        if (stop) break;

        // chart switches between steps; reset the stepper state if changed
        ReducedState znew = z;
        apply_chart_policy(m, znew, opt);
        if (znew.chart != z.chart) {
            z = znew;
            stepper.set_state(z.q, stepper.t());
        }
        if (!events.empty()) eval_events(stepper.t(), z, gprev);
    }
    if (opt.record && (traj.t.empty() || traj.t.back() != stepper.t())) record(stepper.t(), z);
    if (!opt.record) {
        record(stepper.t(), z);  // final state only
    }
    return traj;
}

std::array<double, 2> PeriodicOrbit::at(double t) const {
    double tt = std::fmod(t, T);
    if (tt < 0) tt += T;
    auto it = std::upper_bound(ts.begin(), ts.end(), tt);
    size_t i1 = static_cast<size_t>(it - ts.begin());
    size_t i0 = i1 - 1;
    if (i1 >= ts.size()) i1 = 0;
    double t0 = ts[i0], t1 = i1 == 0 ? T : ts[i1];
    double w = (tt - t0) / std::max(1e-300, t1 - t0);
    const auto &a = samples[i0], &b = samples[i1 == 0 ? 0 : i1];
    // psi is continuous along the orbit away from the poles; no wrap handling
    return {a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])};
}

PeriodicOrbit periodic_orbit(const ReducedModel& m, double h, int block, int nsamples) {
    const int N = m.blocks();
    const double hmax = 0.75 * (1.0 - 10.0 * m.eps);
    if (!(h > 0.0) || h >= hmax)
        throw EnergyOutOfRange("h must lie in (0, 0.75(1-10 eps))");

    // K0 on the lower branch at psi = 0 of the pi_k-restricted 1-dof system
    auto H1 = [&](double K) {
        double a = m.coeffs.a[block], b = m.coeffs.b[block], c = m.coeffs.c[block];
        return 3.0 * K * (1 - K) + m.eps * (a * K + b * K * K + c * K * (1 - K)) -
               m.delta * K * K;
    };
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (H1(mid) < h)
            lo = mid;
        else
            hi = mid;
    }
    double K0 = 0.5 * (lo + hi);

    PeriodicOrbit orb;
    orb.h = h;
    orb.block = block;
    orb.eps = m.eps;
    orb.delta = m.delta;
    orb.K0 = K0;

    std::vector<double> psi(N, 0.0), K(N, 0.0);
    psi[block] = 0.0;
    K[block] = K0;
    ReducedState z0 = ReducedState::angular(psi, K);
    for (int j = 0; j < N; ++j)
        if (j != block) z0.to_chart(j, Chart::Lower);

    // period: return to psi_k = 0 moving upward (psi' > 0 at the low-K branch)
    EventSpec ret;
    ret.g = [block](double, const ReducedState& s) { return s.psi(block); };
    ret.direction = +1;
    ret.terminal = true;
    IntegrateOptions opt;
    opt.tol = 1e-12;
    opt.record = false;
    auto tr = integrate_reduced(m, z0, 0.0, 1e4, opt, {ret});
    if (!tr.stopped_by_event) throw EnergyOutOfRange("no periodic return detected");
    orb.T = tr.events.back().t;

    // resample one period densely
    IntegrateOptions opt2;
    opt2.tol = 1e-12;
    opt2.record = true;
    opt2.record_dt = orb.T / nsamples;
    auto tr2 = integrate_reduced(m, z0, 0.0, orb.T, opt2);
    for (size_t i = 0; i < tr2.t.size(); ++i) {
        if (!orb.ts.empty() && tr2.t[i] <= orb.ts.back()) continue;
        if (tr2.t[i] > orb.T) break;
        orb.ts.push_back(tr2.t[i]);
        orb.samples.push_back({tr2.states[i].psi(block), tr2.states[i].K(block)});
    }
    return orb;
}

}  // namespace reslab
