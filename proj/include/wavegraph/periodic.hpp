#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

namespace wavegraph {

/// One term a cos(2 pi l x) + b sin(2 pi l x).
struct FourierTerm {
    std::int64_t frequency = 0;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

/// A truncated Fourier series on [0, 1), extended periodically.
class FourierSeries {
public:
    FourierSeries() = default;
    explicit FourierSeries(std::vector<FourierTerm> terms);

    double value(double x) const;
    double derivative(double x) const;
    /// Antiderivative with F(0) = 0. Not periodic when the l = 0 term is nonzero.
    double antiderivative(double x) const;
    double l2_norm_squared() const;  // over one period
    bool is_zero() const;

    const std::vector<FourierTerm>& terms() const { return terms_; }

private:
    std::vector<FourierTerm> terms_;
};

/// Initial displacement phi and velocity psi of the periodic 1-D wave problem.
struct PeriodicData {
    FourierSeries phi;
    FourierSeries psi;

    /// ||phi'||_H^2 + ||psi||_H^2.
    double energy() const;
};

/// Parses `{"phi":[[l,a,b],...], "psi":[[l,a,b],...]}`; missing keys mean zero.
PeriodicData parse_periodic_data(const nlohmann::json& doc);
nlohmann::json to_json(const PeriodicData& data);

struct WaveSample {
    double u;
    double u_t;
    double u_x;
};

/// Closed-form d'Alembert solution of u_tt = u_xx with u(.,0) = phi,
/// u_t(.,0) = psi, together with both first partial derivatives.
WaveSample dalembert(const PeriodicData& data, double x, double t);

/// sin(2 pi x) and cos(2 pi x) with the argument reduced to [0, 1) first.
double sin_2pi(double x);
double cos_2pi(double x);

}  // namespace wavegraph
