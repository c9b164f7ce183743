#include "wavegraph/periodic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavegraph {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double reduce(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

std::vector<FourierTerm> parse_terms(const nlohmann::json& arr, const char* what) {
    std::vector<FourierTerm> terms;
    if (!arr.is_array()) throw std::invalid_argument(std::string(what) + " must be an array of [l, a, b]");
    for (const auto& t : arr) {
        if (!t.is_array() || t.size() != 3)
            throw std::invalid_argument(std::string(what) + " terms must be [l, a, b]");
        FourierTerm term;
        double l = t[0].get<double>();
        if (l < 0 || std::floor(l) != l)
            throw std::invalid_argument(std::string(what) + " frequency must be a non-negative integer");
        term.frequency = static_cast<std::int64_t>(l);
        term.cos_coeff = t[1].get<double>();
        term.sin_coeff = t[2].get<double>();
        terms.push_back(term);
    }
    return terms;
}

nlohmann::json terms_json(const FourierSeries& s) {
    auto arr = nlohmann::json::array();
    for (const auto& t : s.terms()) arr.push_back({t.frequency, t.cos_coeff, t.sin_coeff});
    return arr;
}

}  // namespace

double sin_2pi(double x) {
    double r = reduce(x);
    if (r == 0.0 || r == 0.5) return 0.0;
    if (r == 0.25) return 1.0;
    if (r == 0.75) return -1.0;
    return std::sin(two_pi * r);
}

double cos_2pi(double x) {
    double r = reduce(x);
    if (r == 0.0) return 1.0;
    if (r == 0.5) return -1.0;
    if (r == 0.25 || r == 0.75) return 0.0;
    return std::cos(two_pi * r);
}

FourierSeries::FourierSeries(std::vector<FourierTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.frequency < 0) throw std::invalid_argument("Fourier frequency must be non-negative");
    }
}

double FourierSeries::value(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        double lx = static_cast<double>(t.frequency) * x;
        s += t.cos_coeff * cos_2pi(lx) + t.sin_coeff * sin_2pi(lx);
    }
    return s;
}

double FourierSeries::derivative(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        double w = two_pi * static_cast<double>(t.frequency);
        double lx = static_cast<double>(t.frequency) * x;
        s += w * (-t.cos_coeff * sin_2pi(lx) + t.sin_coeff * cos_2pi(lx));
    }
    return s;
}

double FourierSeries::antiderivative(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        if (t.frequency == 0) {
            s += t.cos_coeff * x;
            continue;
        }
        double w = two_pi * static_cast<double>(t.frequency);
        double lx = static_cast<double>(t.frequency) * x;
        s += (t.cos_coeff * sin_2pi(lx) + t.sin_coeff * (1.0 - cos_2pi(lx))) / w;
    }
    return s;
}

double FourierSeries::l2_norm_squared() const {
    // group by frequency so repeated terms combine before squaring
    std::vector<FourierTerm> merged;
    for (const auto& t : terms_) {
        bool found = false;
        for (auto& m : merged) {
            if (m.frequency == t.frequency) {
                m.cos_coeff += t.cos_coeff;
                m.sin_coeff += t.sin_coeff;
                found = true;
            }
        }
        if (!found) merged.push_back(t);
    }
    double s = 0.0;
    for (const auto& m : merged) {
        if (m.frequency == 0) {
            s += m.cos_coeff * m.cos_coeff;
        } else {
            s += 0.5 * (m.cos_coeff * m.cos_coeff + m.sin_coeff * m.sin_coeff);
        }
    }
    return s;
}

bool FourierSeries::is_zero() const {
    for (const auto& t : terms_) {
        if (t.cos_coeff != 0.0 || (t.frequency != 0 && t.sin_coeff != 0.0)) return false;
    }
    return true;
}

double PeriodicData::energy() const {
    std::vector<FourierTerm> dphi;
    for (const auto& t : phi.terms()) {
        if (t.frequency == 0) continue;
        double w = two_pi * static_cast<double>(t.frequency);
        dphi.push_back({t.frequency, w * t.sin_coeff, -w * t.cos_coeff});
    }
    return FourierSeries(std::move(dphi)).l2_norm_squared() + psi.l2_norm_squared();
}

PeriodicData parse_periodic_data(const nlohmann::json& doc) {
    PeriodicData d;
    if (!doc.is_object()) throw std::invalid_argument("periodic data must be an object with phi/psi");
    if (doc.contains("phi")) d.phi = FourierSeries(parse_terms(doc.at("phi"), "phi"));
    if (doc.contains("psi")) d.psi = FourierSeries(parse_terms(doc.at("psi"), "psi"));
    return d;
}

nlohmann::json to_json(const PeriodicData& data) {
    return {{"phi", terms_json(data.phi)}, {"psi", terms_json(data.psi)}};
}

WaveSample dalembert(const PeriodicData& data, double x, double t) {
    const double xp = x + t;
    const double xm = x - t;
    WaveSample s;
    s.u = 0.5 * (data.phi.value(xp) + data.phi.value(xm)) +
          0.5 * (data.psi.antiderivative(xp) - data.psi.antiderivative(xm));
    const double dp = data.phi.derivative(xp);
    const double dm = data.phi.derivative(xm);
    const double pp = data.psi.value(xp);
    const double pm = data.psi.value(xm);
    s.u_t = 0.5 * (dp - dm) + 0.5 * (pp + pm);
    s.u_x = 0.5 * (dp + dm) + 0.5 * (pp - pm);
    return s;
}

}  // namespace wavegraph
