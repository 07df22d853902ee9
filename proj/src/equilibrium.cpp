#include "rfim/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rfim/format.hpp"
#include "rfim/parallel.hpp"

namespace rfim {

namespace {

bool opposite_signs(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

// Bisection on a bracket with f(lo) and f(hi) of opposite sign. Stops once the
// bracket is narrower than tol and the residual is below tol, or when the
// bracket can no longer be split in double precision.
template <typename Fn>
double bisect(Fn f, double lo, double hi, double f_lo, double tol, int max_iter) {
    double best = lo;
    double best_residual = std::fabs(f_lo);
    for (int iter = 0; iter < max_iter; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double f_mid = f(mid);
        if (std::fabs(f_mid) < best_residual) {
            best = mid;
            best_residual = std::fabs(f_mid);
        }
        if (f_mid == 0.0) return mid;
        if (opposite_signs(f_lo, f_mid)) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        if (hi - lo <= tol && std::fabs(f_mid) < tol) return mid;
    }
    return best;
}

void check_options(const SolverOptions& options) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (options.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (options.grid_points < 2) throw std::invalid_argument("grid needs at least two points");
}

EquilibriumSolution make_solution(double m, const ModelParams& params, FieldSignal signal) {
    EquilibriumSolution s;
    s.m = m;
    s.a = rhs_turnover(m, params, signal);
    s.phi = free_energy_density(m, params, signal);
    s.stability = rhs_derivative(m, params, signal) < 1.0 ? Stability::stable : Stability::unstable;
    return s;
}

// Field argument u with F(u) = target, for target in (-1, 1). F is increasing.
double invert_magnetization(double target, double mu) {
    double bound = 1.0;
    while (detail::magnetization_of_field(bound, mu) <= std::fabs(target)) {
        bound *= 2.0;
        if (!std::isfinite(bound)) throw std::domain_error("cannot bracket inverse magnetization");
    }
    auto f = [&](double u) { return detail::magnetization_of_field(u, mu) - target; };
    return bisect(f, -bound, bound, f(-bound), 0.0, 400);
}

}  // namespace

std::string to_string(Stability s) { return s == Stability::stable ? "stable" : "unstable"; }

std::vector<EquilibriumSolution> solve_states(const ModelParams& params, FieldSignal signal,
                                              const SolverOptions& options) {
    validate_ferromagnetic(params);
    check_options(options);
    if (!std::isfinite(signal.sigma)) throw std::invalid_argument("non-finite sigma");

    auto g = [&](double m) { return rhs_magnetization(m, params, signal) - m; };
    const int n = std::max(options.grid_points, 2);
    std::vector<double> xs(static_cast<std::size_t>(n));
    std::vector<double> gs(xs.size());
    for (int i = 0; i < n; ++i) {
        xs[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        gs[i] = g(xs[i]);
    }

    std::vector<EquilibriumSolution> roots;
    for (int i = 0; i < n; ++i) {
        if (gs[i] == 0.0) {
            roots.push_back(make_solution(xs[i], params, signal));
            continue;
        }
        if (i + 1 < n && opposite_signs(gs[i], gs[i + 1])) {
            const double m = bisect(g, xs[i], xs[i + 1], gs[i], options.tol, options.max_iter);
            roots.push_back(make_solution(m, params, signal));
        }
    }
    std::sort(roots.begin(), roots.end(), [](const auto& l, const auto& r) { return l.m < r.m; });
    return roots;
}

EquilibriumSolution select_equilibrium(std::span<const EquilibriumSolution> solutions) {
    if (solutions.empty()) throw std::invalid_argument("no solutions to select from");
    double best_phi = solutions.front().phi;
    for (const auto& s : solutions) best_phi = std::max(best_phi, s.phi);
    const double tie = 1e-12 * std::max(1.0, std::fabs(best_phi));

    const EquilibriumSolution* pick = nullptr;
    for (const auto& s : solutions) {
        if (s.phi < best_phi - tie) continue;
        if (pick == nullptr) {
            pick = &s;
            continue;
        }
        const bool s_nonneg = s.m >= 0.0;
        const bool pick_nonneg = pick->m >= 0.0;
        if (s_nonneg != pick_nonneg) {
            if (s_nonneg) pick = &s;
        } else if (s.phi > pick->phi || (s.phi == pick->phi && s.m > pick->m)) {
            pick = &s;
        }
    }
    return *pick;
}

double critical_coupling(double mu) {
    if (!std::isfinite(mu)) throw std::invalid_argument("non-finite mu");
    // 2e^mu / (1 + 2e^mu) as a logistic, safe for either sign of mu.
    return 1.0 / (1.0 + 0.5 * std::exp(-mu));
}

double turnover_plateau(double mu) {
    return rhs_turnover(0.0, ModelParams{1.0, 0.0, mu}, FieldSignal{0.0});
}

std::vector<SpinodalPoint> spinodal_numeric(double J, double mu, double tol) {
    validate_ferromagnetic(ModelParams{J, 0.0, mu});
    if (!(tol > 0.0)) throw std::invalid_argument("spinodal tolerance must be positive");

    // Along the fixed-point curve h(m) = F^{-1}(m) - J m; the spinodal is where the
    // slope J F'(F^{-1}(m)) crosses 1.
    auto slope_excess = [&](double m) {
        return J * detail::magnetization_slope(invert_magnetization(m, mu), mu) - 1.0;
    };

    constexpr int kGrid = 2001;
    std::vector<double> ms;
    std::vector<double> ss;
    for (int i = 1; i < kGrid - 1; ++i) {
        const double m = -1.0 + 2.0 * static_cast<double>(i) / (kGrid - 1);
        ms.push_back(m);
        ss.push_back(slope_excess(m));
    }

    std::vector<SpinodalPoint> out;
    auto emit = [&](double m) {
        const double u = invert_magnetization(m, mu);
        out.push_back({m, u - J * m});
    };
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (ss[i] == 0.0) {
            emit(ms[i]);
            continue;
        }
        if (i + 1 < ms.size() && opposite_signs(ss[i], ss[i + 1])) {
            emit(bisect(slope_excess, ms[i], ms[i + 1], ss[i], tol, 400));
        }
    }
    return out;
}

double m_star_branch_threshold(double J) { return 0.5 * std::log((J * J + 2.0) / 8.0); }

std::optional<double> m_star_paper(double J, double mu) {
    if (!std::isfinite(J) || !std::isfinite(mu)) throw std::invalid_argument("non-finite input");
    if (J == 0.0) return std::nullopt;
    if (mu >= m_star_branch_threshold(J)) {
        const double radicand = (J - 1.0) / J;
        if (radicand < 0.0) return std::nullopt;
        return std::sqrt(radicand);
    }
    const double radicand = J * J - 2.0 * (4.0 * std::exp(2.0 * mu) - 1.0);
    if (radicand < 0.0) return std::nullopt;
    return std::sqrt(radicand) / std::fabs(J);
}

GridSpec GridSpec::parse(const std::string& text) {
    GridSpec g;
    std::istringstream in(text);
    char c1 = 0;
    char c2 = 0;
    if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' || c2 != ':') {
        throw std::invalid_argument("grid spec must be start:stop:step, got '" + text + "'");
    }
    in >> std::ws;
    if (!in.eof()) throw std::invalid_argument("trailing characters in grid spec '" + text + "'");
    (void)g.points();
    return g;
}

std::vector<double> GridSpec::points() const {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) || step == 0.0) {
        throw std::invalid_argument("grid needs finite bounds and a non-zero step");
    }
    const double span = (stop - start) / step;
    if (span < -1e-9) throw std::invalid_argument("grid step points away from stop");
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = start + static_cast<double>(i) * step;
    return xs;
}

std::vector<SweepRow> sweep_phase_diagram(double mu, const GridSpec& inv_J, double h, FieldSignal signal,
                                          const SolverOptions& options) {
    const std::vector<double> xs = inv_J.points();
    for (double x : xs) {
        if (!(x > 0.0)) throw std::invalid_argument("1/J grid must be strictly positive");
    }
    return parallel_map<SweepRow>(xs.size(), [&](std::size_t i) {
        const ModelParams p{1.0 / xs[i], h, mu};
        const auto eq = select_equilibrium(solve_states(p, signal, options));
        return SweepRow{xs[i], eq.m, eq.a};
    });
}

std::vector<SweepRow> sweep_field(double J, double mu, const GridSpec& h_grid, FieldSignal signal,
                                  const SolverOptions& options) {
    const std::vector<double> hs = h_grid.points();
    return parallel_map<SweepRow>(hs.size(), [&](std::size_t i) {
        const ModelParams p{J, hs[i], mu};
        const auto eq = select_equilibrium(solve_states(p, signal, options));
        return SweepRow{hs[i], eq.m, eq.a};
    });
}

std::string render_sweep_csv(std::span<const SweepRow> rows, const std::string& x_name,
                             const std::string& comment) {
    std::string out;
    if (!comment.empty()) out += "# " + comment + "\n";
    out += x_name + ",m,a\n";
    for (const auto& r : rows) {
        out += format_double(r.x) + "," + format_double(r.m) + "," + format_double(r.a) + "\n";
    }
    return out;
}

}  // namespace rfim
