#include "reslab/reduced_model.hpp"

#include <cmath>
#include <stdexcept>

namespace reslab {

ReducedState ReducedState::angular(const std::vector<double>& psi, const std::vector<double>& K) {
    ReducedState z;
    const size_t N = psi.size();
    z.q.resize(2 * N);
    z.chart.assign(N, Chart::Angular);
    for (size_t j = 0; j < N; ++j) {
        z.q[2 * j] = psi[j];
        z.q[2 * j + 1] = K[j];
    }
    return z;
}

double ReducedState::K(int j) const {
    double a = q[2 * j], b = q[2 * j + 1];
    switch (chart[j]) {
        case Chart::Angular: return b;
        case Chart::Lower: return 0.5 * (a * a + b * b);
        case Chart::Upper: return 1.0 - 0.5 * (a * a + b * b);
    }
    return 0;
}

double ReducedState::psi(int j) const {
    double a = q[2 * j], b = q[2 * j + 1];
    if (chart[j] == Chart::Angular) return wrap_angle(a);
    return wrap_angle(2.0 * std::atan2(b, a));
}

void ReducedState::set_block_angular(int j, double psi, double K) {
    chart[j] = Chart::Angular;
    q[2 * j] = psi;
    q[2 * j + 1] = K;
}

void ReducedState::to_chart(int j, Chart c) {
    if (chart[j] == c) return;
    double ps = psi(j), k = K(j);
    chart[j] = c;
    switch (c) {
        case Chart::Angular:
            q[2 * j] = ps;
            q[2 * j + 1] = k;
            break;
        case Chart::Lower: {
            double r = std::sqrt(std::max(0.0, 2.0 * k));
            q[2 * j] = r * std::cos(ps / 2);
            q[2 * j + 1] = r * std::sin(ps / 2);
            break;
        }
        case Chart::Upper: {
            double r = std::sqrt(std::max(0.0, 2.0 * (1.0 - k)));
            q[2 * j] = r * std::cos(ps / 2);
            q[2 * j + 1] = r * std::sin(ps / 2);
            break;
        }
    }
}

ReducedState ReducedState::in_chart(const std::vector<Chart>& charts) const {
    ReducedState z = *this;
    for (int j = 0; j < blocks(); ++j) z.to_chart(j, charts[j]);
    return z;
}

ReducedState ReducedState::all_angular() const {
    ReducedState z = *this;
    for (int j = 0; j < blocks(); ++j) z.to_chart(j, Chart::Angular);
    return z;
}

ReducedState ReducedState::reversed() const {
    ReducedState z = *this;
    for (int j = 0; j < blocks(); ++j) {
        if (z.chart[j] == Chart::Angular)
            z.q[2 * j] = -z.q[2 * j];
        else
            z.q[2 * j + 1] = -z.q[2 * j + 1];  // psi -> -psi is y -> -y
    }
    return z;
}

ReducedModel ReducedModel::bare(int N, double eps, double delta) {
    ReducedModel m;
    m.coeffs.epsilon = eps;
    m.coeffs.a.assign(N, 0.0);
    m.coeffs.b.assign(N, 0.0);
    m.coeffs.c.assign(N, 0.0);
    m.coeffs.d = Eigen::MatrixXd::Zero(N, N);
    m.eps = eps;
    m.delta = delta;
    return m;
}

double ReducedModel::coupling(const ReducedState& z, int j) const {
    double s = 0;
    for (int i = 0; i < blocks(); ++i)
        if (i != j) s += coeffs.d(j, i) * z.K(i);
    return eps * s;
}

namespace {

double block_H(const ReducedState& z, int j, double a, double b, double c, double eps,
               double delta) {
    const double qa = z.q[2 * j], qb = z.q[2 * j + 1];
    switch (z.chart[j]) {
        case Chart::Angular: {
            double psi = qa, K = qb;
            return K * (1 - K) * (1 + 2 * std::cos(psi)) +
                   eps * (a * K + b * K * K + c * K * (1 - K) * std::cos(psi)) - delta * K * K;
        }
        case Chart::Lower: {
            double r2 = qa * qa + qb * qb, S = qa * qa - qb * qb, K = 0.5 * r2;
            return K * (1 - K) + 0.5 * S * (2 - r2) +
                   eps * (a * K + b * K * K + 0.25 * c * S * (2 - r2)) - delta * K * K;
        }
        case Chart::Upper: {
            double r2 = qa * qa + qb * qb, S = qa * qa - qb * qb, K = 1.0 - 0.5 * r2;
            return K * (1 - K) + K * S + eps * (a * K + b * K * K + 0.5 * c * K * S) -
                   delta * K * K;
        }
    }
    return 0;
}

void block_grad(const ReducedState& z, int j, double a, double b, double c, double eps,
                double delta, double coup, double out[2]) {
    const double qa = z.q[2 * j], qb = z.q[2 * j + 1];
    switch (z.chart[j]) {
        case Chart::Angular: {
            double psi = qa, K = qb, cp = std::cos(psi), sp = std::sin(psi);
            out[0] = -(2 + eps * c) * K * (1 - K) * sp;
            out[1] = (1 - 2 * K) * (1 + 2 * cp) + eps * (a + 2 * b * K + c * (1 - 2 * K) * cp) -
                     2 * delta * K + coup;
            break;
        }
        case Chart::Lower: {
            double x = qa, y = qb;
            double r2 = x * x + y * y, S = x * x - y * y, K = 0.5 * r2;
            out[0] = (1 - 2 * K) * x + x * (2 - r2 - S) +
                     eps * (a * x + 2 * b * K * x + 0.5 * c * x * (2 - r2 - S)) -
                     2 * delta * K * x + coup * x;
            out[1] = (1 - 2 * K) * y - y * (2 - r2 + S) +
                     eps * (a * y + 2 * b * K * y - 0.5 * c * y * (2 - r2 + S)) -
                     2 * delta * K * y + coup * y;
            break;
        }
        case Chart::Upper: {
            double x = qa, y = qb;
            double r2 = x * x + y * y, S = x * x - y * y, K = 1.0 - 0.5 * r2;
            out[0] = -(1 - 2 * K) * x + x * (2 * K - S) +
                     eps * (-a * x - 2 * b * K * x + 0.5 * c * x * (2 * K - S)) +
                     2 * delta * K * x - coup * x;
            out[1] = -(1 - 2 * K) * y - y * (2 * K + S) +
                     eps * (-a * y - 2 * b * K * y - 0.5 * c * y * (2 * K + S)) +
                     2 * delta * K * y - coup * y;
            break;
        }
    }
}

}  // namespace

double ReducedModel::H(const ReducedState& z) const {
    const int N = blocks();
    double s = 0;
    for (int j = 0; j < N; ++j)
        s += block_H(z, j, coeffs.a[j], coeffs.b[j], coeffs.c[j], eps, delta);
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) s += eps * coeffs.d(i, j) * z.K(i) * z.K(j);
    return s;
}

void ReducedModel::grad_block(const ReducedState& z, int j, double coup, double out[2]) const {
    block_grad(z, j, coeffs.a[j], coeffs.b[j], coeffs.c[j], eps, delta, coup, out);
}

void ReducedModel::field(const ReducedState& z, std::vector<double>& out) const {
    const int N = blocks();
    out.resize(2 * N);
    double g[2];
    for (int j = 0; j < N; ++j) {
        double coup = coupling(z, j);
        grad_block(z, j, coup, g);
        switch (z.chart[j]) {
            case Chart::Angular:  // psi' = dH/dK, K' = -dH/dpsi
                out[2 * j] = g[1];
                out[2 * j + 1] = -g[0];
                break;
            case Chart::Lower:  // induced form -2 dx^dy
                out[2 * j] = -0.5 * g[1];
                out[2 * j + 1] = 0.5 * g[0];
                break;
            case Chart::Upper:  // induced form +2 dx^dy
                out[2 * j] = 0.5 * g[1];
                out[2 * j + 1] = -0.5 * g[0];
                break;
        }
    }
}

SaddlePoint saddle_point(const ReducedModel& m, int sign, int level) {
    const int N = m.blocks();
    SaddlePoint s;
    s.sign = sign;
    s.level = level;
    std::vector<double> psi(N), K(N, level == 0 ? 0.0 : 1.0);
    for (int j = 0; j < N; ++j) {
        double a = m.coeffs.a[j], b = m.coeffs.b[j], c = m.coeffs.c[j];
        double cospsi;
        if (level == 0) {
            // dH/dK = 0 on {K=0}: (1+2cos) + eps(a + c cos) = 0
            cospsi = -(1.0 + m.eps * a) / (2.0 + m.eps * c);
        } else {
            // on {K=1, all blocks}: -(1+2cos) + eps(a + 2b + sum d - c cos) - 2 delta = 0
            double dsum = 0;
            for (int i = 0; i < N; ++i)
                if (i != j) dsum += m.coeffs.d(j, i);
            cospsi = (m.eps * (a + 2 * b + dsum) - 2.0 * m.delta - 1.0) / (2.0 + m.eps * c);
        }
        if (std::abs(cospsi) > 1.0) throw std::runtime_error("saddle angle undefined");
        double ps = std::acos(cospsi);
        psi[j] = sign > 0 ? ps : -ps;
        s.psi_star.push_back(psi[j]);
        s.eigenvalues.push_back((2.0 + m.eps * c) * std::abs(std::sin(ps)));
    }
    s.location = ReducedState::angular(psi, K);
    return s;
}

ReducedState heteroclinic_state(int sign, const std::vector<double>& tau) {
    const size_t N = tau.size();
    std::vector<double> psi(N), K(N);
    for (size_t j = 0; j < N; ++j) {
        psi[j] = sign * 2.0 * M_PI / 3.0;
        K[j] = 1.0 / (1.0 + std::exp(-sign * std::sqrt(3.0) * tau[j]));
    }
    return ReducedState::angular(psi, K);
}

double homoclinic_psi(double t) {
    return 2.0 * std::atan(-std::sqrt(3.0) * std::tanh(0.5 * std::sqrt(3.0) * t));
}

double homoclinic_K(double t, double delta) {
    return 1.0 / (1.0 - delta / 3.0 * (1.0 - 2.0 * std::cosh(std::sqrt(3.0) * t)));
}

double homoclinic_dK(double t, double delta) {
    double s3 = std::sqrt(3.0);
    double den = 1.0 - delta / 3.0 * (1.0 - 2.0 * std::cosh(s3 * t));
    double dden = delta / 3.0 * 2.0 * s3 * std::sinh(s3 * t);
    return -dden / (den * den);
}

ReducedState modified_homoclinic_state(const std::vector<double>& tau, double delta) {
    const size_t N = tau.size();
    std::vector<double> psi(N), K(N);
    for (size_t j = 0; j < N; ++j) {
        psi[j] = homoclinic_psi(tau[j]);
        K[j] = homoclinic_K(tau[j], delta);
    }
    return ReducedState::angular(psi, K);
}

}  // namespace reslab
