// Three-state random-field Ising model: equation-of-state right-hand sides,
// free energy density and derivatives.
//
// Every function here shares the denominator 1 + 2 e^mu cosh(u), u = J m + h sigma.
// The raw form overflows for large mu + |u|, so evaluation goes through a
// rescaled representation (see model.cpp). Inverse temperature is fixed to 1.
#ifndef RFIM_MODEL_HPP
#define RFIM_MODEL_HPP

namespace rfim {

/// Hyper-parameters of the Hamiltonian.
struct ModelParams {
    double J = 0.0;   ///< coupling (endogenous information)
    double h = 0.0;   ///< strength of the external trend field
    double mu = 0.0;  ///< chemical potential weighting |S_i|
};

/// Instantaneous market trend sigma(t), in price units per tick.
struct FieldSignal {
    double sigma = 0.0;
};

/// Magnetization (net return) and turnover (active fraction).
struct Observables {
    double m = 0.0;
    double a = 0.0;
};

/// Throws std::invalid_argument unless all three fields are finite.
void validate(const ModelParams& params);

/// Equilibrium analysis works in the ferromagnetic regime only.
void validate_ferromagnetic(const ModelParams& params);

/// m -> 2e^mu sinh(u) / (1 + 2e^mu cosh(u)). Result lies in (-1, 1).
double rhs_magnetization(double m, const ModelParams& params, FieldSignal signal);

/// m -> 2e^mu cosh(u) / (1 + 2e^mu cosh(u)). Result lies in (0, 1).
double rhs_turnover(double m, const ModelParams& params, FieldSignal signal);

/// Both right-hand sides from one evaluation of the shared denominator.
Observables rhs_observables(double m, const ModelParams& params, FieldSignal signal);

/// Phi(m) = -(J/2) m^2 + log(1 + 2e^mu cosh(u)). Equilibria maximize Phi.
double free_energy_density(double m, const ModelParams& params, FieldSignal signal);

/// d/dm of rhs_magnetization, closed form J (2e^mu cosh u + 4e^{2mu}) / D^2.
double rhs_derivative(double m, const ModelParams& params, FieldSignal signal);

// Building blocks in terms of the field argument u directly. Used by the
// learning gradients and the spinodal solver. None of these validate input.
namespace detail {

/// F(u) = 2e^mu sinh(u) / (1 + 2e^mu cosh(u))
double magnetization_of_field(double u, double mu);
/// 2e^mu cosh(u) / (1 + 2e^mu cosh(u))
double turnover_of_field(double u, double mu);
/// dF/du
double magnetization_slope(double u, double mu);
/// dF/dmu = 2e^mu sinh(u) / (1 + 2e^mu cosh(u))^2
double magnetization_mu_slope(double u, double mu);
/// log(1 + 2e^mu cosh(u))
double log_partition(double u, double mu);

}  // namespace detail

}  // namespace rfim

#endif  // RFIM_MODEL_HPP
