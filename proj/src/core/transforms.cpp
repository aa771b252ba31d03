#include "transforms.hpp"

#include <cmath>

#include "fft.hpp"

namespace sns {

Field gauge(const Field& f, const Field& psi, int sign) {
    if (!f.grid.same_as(psi.grid)) throw Error("gauge: grid mismatch");
    Field out(f.grid);
    double s = sign >= 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        out.values[i] = f.values[i] * std::exp(s * psi.values[i]);
    return out;
}

void require_band_limited(const Field& f, double tol) {
    double frac = fft::high_mode_mass_fraction(f.grid, f.values);
    if (frac > tol)
        throw AliasingError("field carries " + std::to_string(frac) +
                            " of its spectral mass in the top third of the band");
}

namespace {

void require_core_mass(const Field& f, double tol, const char* what) {
    const Grid& g = f.grid;
    double core = 0.25 * g.L();
    double inside = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double m = std::norm(f.values[i]);
        if (std::sqrt(g.radius_sq(i)) < core) inside += m; else outside += m;
    }
    double total = inside + outside;
    if (total > 0.0 && outside / total > tol)
        throw AliasingError(std::string(what) + ": source mass outside the safe core |x| < L/4");
}

Field chirp(const Field& f, double coef) {
    // multiply by exp(i coef |x|^2)
    Field out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i)
        out.values[i] = f.values[i] * std::polar(1.0, coef * f.grid.radius_sq(i));
    return out;
}

Field sample_dilated(const Field& f, double factor) {
    // values of f at the points factor * x over the grid
    const Grid& g = f.grid;
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(g.d()));
    for (auto& p : pts) {
        p.resize(static_cast<std::size_t>(g.n()));
        for (int i = 0; i < g.n(); ++i) p[static_cast<std::size_t>(i)] = factor * g.position(i);
    }
    return Field(g, fft::interpolate_tensor(g, f.values, pts));
}

} // namespace

Field pct_forward(const Field& v, double t, double t_max) {
    if (!(t >= 0.0 && t <= t_max)) throw Error("pct_forward: t outside [0, t_max]");
    require_band_limited(v);
    require_core_mass(v, 1e-8, "pct_forward");
    double om = 1.0 - t;
    Field sampled = (t == 0.0) ? v : sample_dilated(v, 1.0 / om);
    double amp = std::pow(om, -0.5 * v.grid.d());
    for (auto& z : sampled.values) z *= amp;
    return chirp(sampled, 0.25 / om);
}

Field pct_inverse(const Field& w, double t, double t_max) {
    if (!(t >= 0.0 && t <= t_max)) throw Error("pct_inverse: t outside [0, t_max]");
    double om = 1.0 - t;
    Field flat = chirp(w, -0.25 / om);
    require_band_limited(flat);
    Field sampled = (t == 0.0) ? flat : sample_dilated(flat, om);
    double amp = std::pow(om, 0.5 * w.grid.d());
    for (auto& z : sampled.values) z *= amp;
    return sampled;
}

Field dilation(const Field& f, double beta) {
    if (!(beta > 0.0)) throw Error("dilation: beta must be positive");
    require_band_limited(f);
    if (beta > 1.0) require_core_mass(f, 1e-8, "dilation");
    Field out = sample_dilated(f, beta);
    double amp = std::pow(beta, 0.5 * f.grid.d());
    for (auto& z : out.values) z *= amp;
    return out;
}

Field modulation(const Field& f, double sigma) {
    return chirp(f, 0.25 * sigma);
}

Field scattering_pullback(const Field& X_t, double t, const NoiseModel& model, bool star) {
    Field psi = star ? model.phi_star(t, X_t.grid) : model.phi(t, X_t.grid);
    return free_propagate(gauge(X_t, psi, -1), t);
}

Field scattering_pullback_V(const Field& X_t, double t, const NoiseModel& model,
                            const StepPlan& plan, bool star) {
    Field psi = star ? model.phi_star(t, X_t.grid) : model.phi(t, X_t.grid);
    return homogeneous_evolve_backward(gauge(X_t, psi, -1), t, 0.0, model, plan, star);
}

double asymptotic_equivalence_check(const SpaceTimeSeries& z_series,
                                    const SpaceTimeSeries& lensed_series) {
    if (z_series.times.size() != lensed_series.times.size())
        throw Error("asymptotic_equivalence: sample counts differ");
    double worst = 0.0;
    for (std::size_t j = 0; j < z_series.times.size(); ++j) {
        double s = z_series.times[j];
        double t = lensed_series.times[j];
        if (std::abs(t - s / (1.0 + s)) > 1e-9 * (1.0 + std::abs(t)))
            throw Error("asymptotic_equivalence: time grids not matched by s -> s/(1+s)");
        Field lhs = free_propagate(z_series.fields[j], s);
        Field rhs = modulation(free_propagate(lensed_series.fields[j], t), -1.0);
        double den = norm_lp(z_series.fields[j], 2.0);
        double num = 0.0;
        for (std::size_t i = 0; i < lhs.size(); ++i) num += std::norm(lhs.values[i] - rhs.values[i]);
        num = std::sqrt(num * lhs.grid.cell_volume());
        worst = std::max(worst, den > 0.0 ? num / den : num);
    }
    return worst;
}

} // namespace sns
