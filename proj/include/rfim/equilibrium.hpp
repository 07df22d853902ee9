// Fixed points of the equations of state, equilibrium selection and critical
// quantities of the three-state model.
#ifndef RFIM_EQUILIBRIUM_HPP
#define RFIM_EQUILIBRIUM_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rfim/model.hpp"

namespace rfim {

enum class Stability { stable, unstable };

std::string to_string(Stability s);

struct EquilibriumSolution {
    double m = 0.0;
    double a = 0.0;
    double phi = 0.0;
    Stability stability = Stability::stable;
};

struct SpinodalPoint {
    double m_star = 0.0;
    double h_c = 0.0;
};

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 200;
    int grid_points = 2001;
};

/// All fixed points of m = rhs_magnetization(m) in [-1, 1], sorted by m.
///
/// The residual g(m) = rhs(m) - m is bracketed on a uniform grid and each sign
/// change is refined by bisection. g(-1) > 0 > g(1), so the result is never empty.
/// Fixed points closer together than one grid cell can merge into one.
std::vector<EquilibriumSolution> solve_states(const ModelParams& params, FieldSignal signal,
                                              const SolverOptions& options = {});

/// The Phi-maximizing solution; near-ties go to m >= 0.
EquilibriumSolution select_equilibrium(std::span<const EquilibriumSolution> solutions);

/// (1/J)_c = 2e^mu / (1 + 2e^mu), from linearizing the equation of state at m = 0.
double critical_coupling(double mu);

/// Disordered-phase turnover rhs_turnover(0) at h = 0.
double turnover_plateau(double mu);

/// Spinodal points (m*, h_c) with sigma = 1: simultaneous solutions of
/// m = rhs(m; h) and rhs'(m; h) = 1. Empty outside the bistable region.
std::vector<SpinodalPoint> spinodal_numeric(double J, double mu, double tol = 1e-10);

/// Closed-form piecewise m* as printed in the source model description,
/// kept verbatim for comparison with spinodal_numeric. Returns the positive
/// member of the +/- pair, or nullopt when the radicand is negative.
std::optional<double> m_star_paper(double J, double mu);

/// Closed-form threshold 1/2 log((J^2 + 2) / 8) separating the two m* branches.
double m_star_branch_threshold(double J);

/// Inclusive arithmetic grid "start:stop:step".
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    static GridSpec parse(const std::string& text);
    std::vector<double> points() const;
};

struct SweepRow {
    double x = 0.0;  ///< 1/J for coupling sweeps, h for field sweeps
    double m = 0.0;
    double a = 0.0;
};

/// Equilibrium (m, a) at each 1/J on the grid, at fixed mu, h and sigma.
std::vector<SweepRow> sweep_phase_diagram(double mu, const GridSpec& inv_J, double h, FieldSignal signal,
                                          const SolverOptions& options = {});

/// Equilibrium (m, a) at each h on the grid, at fixed J, mu and sigma.
std::vector<SweepRow> sweep_field(double J, double mu, const GridSpec& h_grid, FieldSignal signal,
                                  const SolverOptions& options = {});

/// CSV with header "<x_name>,m,a" and 17 significant digits.
std::string render_sweep_csv(std::span<const SweepRow> rows, const std::string& x_name,
                             const std::string& comment = {});

}  // namespace rfim

#endif  // RFIM_EQUILIBRIUM_HPP
