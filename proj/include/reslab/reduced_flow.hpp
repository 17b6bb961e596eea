#pragma once
#include <functional>
#include <optional>
#include <string>

#include "reslab/ode.hpp"
#include "reslab/reduced_model.hpp"

namespace reslab {

struct IntegrateOptions {
    double tol = 1e-10;
    double margin = 0.05;      // angular chart valid for K in (margin, 1-margin)
    double hysteresis = 0.01;  // switch back only past margin+hysteresis
    double h_init = 1e-3;
    bool record = true;
    double record_dt = 0.0;  // 0: record accepted steps; >0: dense resample
};

struct EventSpec {
    std::function<double(double, const ReducedState&)> g;
    int direction = 0;  // +1 rising, -1 falling, 0 both
    bool terminal = false;
};

struct EventHit {
    int which = 0;
    double t = 0;
    ReducedState state;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<ReducedState> states;
    std::vector<EventHit> events;
    double time_scale = 1.0;  // model time -> original PDE time factor
    bool stopped_by_event = false;

    const ReducedState& back_state() const { return states.back(); }
    // per-sample Hamiltonian drift diagnostics filled by the driver
    double H_start = 0, H_max_drift = 0;
};

// Adaptive integration of the reduced model with automatic per-block chart
// switching at the margin crossings and dense-output event location.
Trajectory integrate_reduced(const ReducedModel& m, const ReducedState& z0, double t0, double t1,
                             const IntegrateOptions& opt = {},
                             const std::vector<EventSpec>& events = {});

struct EnergyOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PeriodicOrbit {
    double h = 0;
    int block = 0;
    double eps = 0, delta = 0;
    double T = 0;       // period
    double K0 = 0;      // K at psi = 0, lower branch
    std::vector<double> ts;                    // sample times in [0, T]
    std::vector<std::array<double, 2>> samples;  // (psi, K)
    std::array<double, 2> at(double t) const;    // periodic linear interpolation
};

// Level-set periodic orbit of the pi_k-restricted 1-dof Hamiltonian
// (delta-modified when m.delta > 0), sampled over one period measured by the
// event-located return to psi = 0.
PeriodicOrbit periodic_orbit(const ReducedModel& m, double h, int block, int nsamples = 1024);

}  // namespace reslab
