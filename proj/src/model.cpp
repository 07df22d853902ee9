#include "rfim/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rfim {

namespace {

// Above this exponent the shared denominator is rescaled by exp(-(mu + |u|)).
constexpr double kRescaleThreshold = 30.0;

// The denominator D = 1 + 2e^mu cosh(u) written as scale * (lead + weight (1 + q))
// with q = e^{-2|u|}. Either lead = 1, weight = e^{mu+|u|}, scale = 1, or
// lead = e^{-(mu+|u|)}, weight = 1, scale = e^{mu+|u|}. Both keep every term O(1).
struct Denominator {
    double lead;
    double weight;
    double q;
    double one_minus_q;
    double log_scale;
    double sign;

    double scaled() const { return lead + weight * (1.0 + q); }
};

Denominator split(double u, double mu) {
    const double au = std::fabs(u);
    const double k = mu + au;
    Denominator d{};
    d.q = std::exp(-2.0 * au);
    d.one_minus_q = -std::expm1(-2.0 * au);
    d.sign = u < 0.0 ? -1.0 : 1.0;
    if (k > kRescaleThreshold) {
        d.lead = std::exp(-k);
        d.weight = 1.0;
        d.log_scale = k;
    } else {
        d.lead = 1.0;
        d.weight = std::exp(k);
        d.log_scale = 0.0;
    }
    return d;
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string("non-finite ") + name);
    }
}

double field_argument(double m, const ModelParams& params, FieldSignal signal) {
    validate(params);
    require_finite(m, "m");
    require_finite(signal.sigma, "sigma");
    const double u = params.J * m + params.h * signal.sigma;
    require_finite(u, "field argument");
    return u;
}

}  // namespace

void validate(const ModelParams& params) {
    require_finite(params.J, "J");
    require_finite(params.h, "h");
    require_finite(params.mu, "mu");
}

void validate_ferromagnetic(const ModelParams& params) {
    validate(params);
    if (!(params.J > 0.0)) {
        throw std::invalid_argument("equilibrium analysis requires J > 0");
    }
}

namespace detail {

double magnetization_of_field(double u, double mu) {
    const Denominator d = split(u, mu);
    return d.sign * d.weight * d.one_minus_q / d.scaled();
}

double turnover_of_field(double u, double mu) {
    const Denominator d = split(u, mu);
    return d.weight * (1.0 + d.q) / d.scaled();
}

double magnetization_slope(double u, double mu) {
    const Denominator d = split(u, mu);
    const double den = d.scaled();
    const double cosh_part = d.weight * (1.0 + d.q);
    return (d.lead * cosh_part + 4.0 * d.weight * d.weight * d.q) / (den * den);
}

double magnetization_mu_slope(double u, double mu) {
    const Denominator d = split(u, mu);
    const double den = d.scaled();
    return d.lead * d.sign * d.weight * d.one_minus_q / (den * den);
}

double log_partition(double u, double mu) {
    const Denominator d = split(u, mu);
    if (d.log_scale > 0.0) {
        return d.log_scale + std::log(d.scaled());
    }
    return std::log1p(d.weight * (1.0 + d.q));
}

}  // namespace detail

double rhs_magnetization(double m, const ModelParams& params, FieldSignal signal) {
    return detail::magnetization_of_field(field_argument(m, params, signal), params.mu);
}

double rhs_turnover(double m, const ModelParams& params, FieldSignal signal) {
    return detail::turnover_of_field(field_argument(m, params, signal), params.mu);
}

Observables rhs_observables(double m, const ModelParams& params, FieldSignal signal) {
    const double u = field_argument(m, params, signal);
    return {detail::magnetization_of_field(u, params.mu), detail::turnover_of_field(u, params.mu)};
}

double free_energy_density(double m, const ModelParams& params, FieldSignal signal) {
    const double u = field_argument(m, params, signal);
    return -0.5 * params.J * m * m + detail::log_partition(u, params.mu);
}

double rhs_derivative(double m, const ModelParams& params, FieldSignal signal) {
    const double u = field_argument(m, params, signal);
    return params.J * detail::magnetization_slope(u, params.mu);
}

}  // namespace rfim
