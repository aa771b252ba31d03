#include "dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "exponents.hpp"
#include "fft.hpp"

namespace sns {

namespace {

std::vector<double> k_squared(const Grid& g) {
    std::vector<double> k2(g.size());
    for (std::size_t i = 0; i < k2.size(); ++i) {
        auto ii = g.unflatten(i);
        double acc = 0.0;
        for (int a = 0; a < g.d(); ++a) {
            double k = g.wavenumber(ii[static_cast<std::size_t>(a)]);
            acc += k * k;
        }
        k2[i] = acc;
    }
    return k2;
}

void apply_multiplier(const Grid& g, std::vector<cplx>& v, const std::vector<cplx>& mult) {
    fft::forward(g, v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mult[i];
    fft::inverse(g, v);
}

std::vector<cplx> linear_multiplier(const Grid& g, const std::vector<double>& k2, double dt) {
    // one substep of d_t X = -i Delta X over dt: multiplier exp(+i |k|^2 dt)
    std::vector<cplx> m(g.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::polar(1.0, k2[i] * dt);
    return m;
}

void nonlinear_inplace(std::vector<cplx>& v, double dt, double alpha, double lambda) {
    if (lambda == 0.0) return;
    double am1 = alpha - 1.0;
    for (auto& z : v) {
        double mod = std::abs(z);
        if (mod == 0.0) continue;
        z *= std::polar(1.0, -lambda * std::pow(mod, am1) * dt);
    }
}

// Per-evolve cache of the spatial noise factors.
struct NoiseCache {
    bool scalar = false;                      // all profiles constant
    std::vector<cplx> amp;                    // constant profile values
    std::vector<std::vector<cplx>> phi_k;     // fields otherwise
    std::vector<std::vector<cplx>> rho_k;
    std::vector<cplx> rho_amp;                // constant-profile rho values

    static NoiseCache build(const NoiseModel& m, const Grid& g) {
        NoiseCache c;
        c.scalar = m.constant_profiles();
        for (int k = 0; k < m.N(); ++k) {
            const auto& sp = m.channel(k).spatial;
            if (c.scalar) {
                cplx v = sp.amplitude();
                c.amp.push_back(v);
                c.rho_amp.push_back(v.real() * v);
            } else {
                c.phi_k.push_back(sp.evaluate(g).values);
                c.rho_k.push_back(sp.rho().evaluate(g).values);
            }
        }
        return c;
    }

    // multiply v by exp(sum_k phi_k a_k - rho_k b_k)
    void apply(std::vector<cplx>& v, const std::vector<double>& a,
               const std::vector<double>& b) const {
        if (amp.empty() && phi_k.empty()) return;
        if (scalar) {
            cplx expo(0.0, 0.0);
            for (std::size_t k = 0; k < amp.size(); ++k) expo += amp[k] * a[k] - rho_amp[k] * b[k];
            cplx w = std::exp(expo);
            for (auto& z : v) z *= w;
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            cplx expo(0.0, 0.0);
            for (std::size_t k = 0; k < phi_k.size(); ++k)
                expo += phi_k[k][i] * a[k] - rho_k[k][i] * b[k];
            v[i] *= std::exp(expo);
        }
    }
};

bool sup_exceeds(const std::vector<cplx>& v, double cap) {
    for (const auto& z : v) {
        double m2 = std::norm(z);
        if (!std::isfinite(m2) || m2 > cap * cap) return true;
    }
    return false;
}

int step_count(double span, double dt) {
    double raw = span / dt;
    int n = static_cast<int>(std::llround(raw));
    if (n < 1 || std::abs(raw - n) > 1e-9 * std::max(1.0, raw))
        throw ConfigError("time span must be an integer number of steps");
    return n;
}

struct LensedWeight {
    double h_power = 0.0;
    double am1 = 0.0;
    const NoiseModel* model = nullptr;
    double operator()(double t) const {
        double h = std::pow(1.0 - t, h_power);
        if (!model || model->N() == 0) return h;
        double s = t / (1.0 - t);
        return h * std::exp(am1 * model->re_phi_uniform(s));
    }
};

} // namespace

Field free_propagate(const Field& f, double t) {
    const Grid& g = f.grid;
    auto k2 = k_squared(g);
    std::vector<cplx> v = f.values;
    fft::forward(g, v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -k2[i] * t);
    fft::inverse(g, v);
    return Field(g, std::move(v));
}

Field step_nonlinear(const Field& f, double dt, double alpha, double lambda) {
    if (!(alpha > 1.0)) throw Error("step_nonlinear: alpha must exceed 1");
    std::vector<cplx> v = f.values;
    nonlinear_inplace(v, dt, alpha, lambda);
    return Field(f.grid, std::move(v));
}

Field step_noise(const Field& f, const NoiseModel& model, int cell_index) {
    if (cell_index < 0 || cell_index >= model.mesh_cells())
        throw Error("step_noise: increments must belong to this cell");
    NoiseCache cache = NoiseCache::build(model, f.grid);
    std::vector<double> a(static_cast<std::size_t>(model.N()));
    std::vector<double> b(static_cast<std::size_t>(model.N()));
    double dt = model.mesh_dt();
    for (int k = 0; k < model.N(); ++k) {
        const auto& ch = model.channel(k);
        double tl = ch.path.cell_left_time(cell_index);
        double gl = ch.temporal(tl);
        a[static_cast<std::size_t>(k)] = gl * ch.path.increments()[static_cast<std::size_t>(cell_index)];
        b[static_cast<std::size_t>(k)] = gl * gl * dt;
    }
    std::vector<cplx> v = f.values;
    cache.apply(v, a, b);
    return Field(f.grid, std::move(v));
}

namespace {

Trajectory run_split(const Field& X0, std::shared_ptr<NoiseModel> model, const StepPlan& plan,
                     double t_from, double t_to, double alpha, double lambda,
                     const LensedWeight* lensed) {
    const Grid& g = X0.grid;
    Trajectory traj;
    traj.t0 = t_from;
    traj.dt = plan.dt;
    traj.lambda = static_cast<int>(lambda);
    traj.alpha = alpha;
    traj.model_used = model;

    int steps = step_count(t_to - t_from, plan.dt);
    traj.steps = steps;
    int nch = model ? model->N() : 0;
    traj.increments.assign(static_cast<std::size_t>(nch), {});
    for (auto& v : traj.increments) v.reserve(static_cast<std::size_t>(steps));

    auto k2 = k_squared(g);
    auto half = linear_multiplier(g, k2, 0.5 * plan.dt);
    auto full = linear_multiplier(g, k2, plan.dt);
    NoiseCache cache = model ? NoiseCache::build(*model, g) : NoiseCache{};

    std::vector<cplx> v = X0.values;
    traj.series.push(t_from, X0);
    traj.snapshot_step.push_back(0);

    std::vector<double> a(static_cast<std::size_t>(nch)), b(static_cast<std::size_t>(nch));
    for (int i = 0; i < steps; ++i) {
        double tl = t_from + i * plan.dt;
        if (nch > 0) {
            for (int k = 0; k < nch; ++k) {
                const auto& ch = model->channel(k);
                double gl = ch.temporal(tl);
                double db = ch.path.increments()[static_cast<std::size_t>(i)];
                a[static_cast<std::size_t>(k)] = gl * db;
                b[static_cast<std::size_t>(k)] = gl * gl * plan.dt;
                traj.increments[static_cast<std::size_t>(k)].push_back(db);
            }
            cache.apply(v, a, b);
        }
        if (plan.scheme == SplitScheme::Strang) {
            apply_multiplier(g, v, half);
            if (lensed) {
                double w = (*lensed)(tl + 0.5 * plan.dt);
                nonlinear_inplace(v, w * plan.dt, alpha, lambda);
            } else {
                nonlinear_inplace(v, plan.dt, alpha, lambda);
            }
            apply_multiplier(g, v, half);
        } else {
            apply_multiplier(g, v, full);
            if (lensed) {
                double w = (*lensed)(tl + 0.5 * plan.dt);
                nonlinear_inplace(v, w * plan.dt, alpha, lambda);
            } else {
                nonlinear_inplace(v, plan.dt, alpha, lambda);
            }
        }
        double t_next = t_from + (i + 1) * plan.dt;
        if (sup_exceeds(v, plan.blowup_cap)) {
            traj.blew_up = true;
            traj.blowup_time = t_next;
            break;
        }
        if ((i + 1) % plan.snapshot_stride == 0 || i + 1 == steps) {
            traj.series.push(t_next, Field(g, v));
            traj.snapshot_step.push_back(static_cast<std::size_t>(i + 1));
        }
    }
    return traj;
}

} // namespace

Trajectory evolve_X(const Field& X0, const NoiseModel& model, const StepPlan& plan,
                    double T, double alpha) {
    if (!(alpha > 1.0)) throw Error("evolve_X: alpha must exceed 1");
    if (T > model.horizon() * (1.0 + 1e-12)) throw ConfigError("evolve_X: T beyond mesh horizon");
    std::shared_ptr<NoiseModel> refined;
    if (model.N() > 0) refined = std::make_shared<NoiseModel>(model.refined_to(plan.dt));
    return run_split(X0, refined, plan, 0.0, T, alpha, model.lambda(), nullptr);
}

Trajectory evolve_deterministic(const Field& u0, const StepPlan& plan, double t_from,
                                double t_to, double alpha, double lambda) {
    if (!(alpha > 1.0)) throw Error("evolve_deterministic: alpha must exceed 1");
    return run_split(u0, nullptr, plan, t_from, t_to, alpha, lambda, nullptr);
}

Trajectory evolve_lensed(const Field& w0, const NoiseModel& model, const StepPlan& plan,
                         double t0, double t1, double alpha) {
    if (!(alpha > 1.0)) throw Error("evolve_lensed: alpha must exceed 1");
    if (!(t1 < 1.0)) throw ConfigError("evolve_lensed: t1 must stay below the lens endpoint 1");
    if (!(t0 >= 0.0 && t0 < t1)) throw ConfigError("evolve_lensed: need 0 <= t0 < t1 < 1");
    if (model.N() > 0 && !model.constant_profiles())
        throw ConfigError("evolve_lensed: non-constant profiles are outside the lensed integrator");
    double s1 = t1 / (1.0 - t1);
    if (model.N() > 0 && s1 > model.horizon() * (1.0 + 1e-12))
        throw ConfigError("evolve_lensed: t1 maps beyond the mesh horizon");

    auto table = exponents(w0.grid.d(), alpha, model.lambda());
    LensedWeight w;
    w.h_power = table.h_power;
    w.am1 = alpha - 1.0;
    w.model = model.N() > 0 ? &model : nullptr;
    // The lensed equation has no noise substep; randomness enters only
    // through the damping weight, so the model is not refined here.
    return run_split(w0, nullptr, plan, t0, t1, alpha, model.lambda(), &w);
}

namespace {

// Linear stochastic flow Lambda between step indices (model mesh == dt).
void linear_flow_steps(const Grid& g, std::vector<cplx>& v, const NoiseModel& model,
                       double dt, int from_step, int to_step) {
    auto k2 = k_squared(g);
    NoiseCache cache = NoiseCache::build(model, g);
    std::vector<double> a(static_cast<std::size_t>(model.N()));
    std::vector<double> b(static_cast<std::size_t>(model.N()));
    auto fill_ab = [&](int i) {
        for (int k = 0; k < model.N(); ++k) {
            const auto& ch = model.channel(k);
            double tl = ch.path.cell_left_time(i);
            double gl = ch.temporal(tl);
            a[static_cast<std::size_t>(k)] = gl * ch.path.increments()[static_cast<std::size_t>(i)];
            b[static_cast<std::size_t>(k)] = gl * gl * dt;
        }
    };
    if (to_step >= from_step) {
        auto full = linear_multiplier(g, k2, dt);
        for (int i = from_step; i < to_step; ++i) {
            fill_ab(i);
            cache.apply(v, a, b);
            apply_multiplier(g, v, full);
        }
    } else {
        auto full_inv = linear_multiplier(g, k2, -dt);
        for (int i = from_step - 1; i >= to_step; --i) {
            fill_ab(i);
            apply_multiplier(g, v, full_inv);
            for (auto& x : a) x = -x;
            for (auto& x : b) x = -x;
            cache.apply(v, a, b);
        }
    }
}

int aligned_step(double t, double dt) {
    double raw = t / dt;
    int n = static_cast<int>(std::llround(raw));
    if (std::abs(raw - n) > 1e-9 * std::max(1.0, std::abs(raw)))
        throw Error("homogeneous_evolve: times must sit on the step grid");
    return n;
}

Field homogeneous_impl(const Field& vin, double t_from, double t_to, const NoiseModel& model,
                       const StepPlan& plan, bool star) {
    const Grid& g = vin.grid;
    if (model.N() == 0) return free_propagate(vin, -(t_to - t_from));
    NoiseModel refined = model.refined_to(plan.dt);
    Field psi_from = star ? refined.phi_star(t_from, g) : refined.phi(t_from, g);
    Field psi_to = star ? refined.phi_star(t_to, g) : refined.phi(t_to, g);
    std::vector<cplx> v = vin.values;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::exp(psi_from.values[i]);
    linear_flow_steps(g, v, refined, plan.dt, aligned_step(t_from, plan.dt),
                      aligned_step(t_to, plan.dt));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::exp(-psi_to.values[i]);
    return Field(g, std::move(v));
}

} // namespace

Field homogeneous_evolve(const Field& v_s, double s, double t, const NoiseModel& model,
                         const StepPlan& plan, bool star) {
    if (s > t) throw Error("homogeneous_evolve: needs s <= t");
    if (t > model.horizon() * (1.0 + 1e-12)) throw Error("homogeneous_evolve: t beyond horizon");
    return homogeneous_impl(v_s, s, t, model, plan, star);
}

Field homogeneous_evolve_backward(const Field& v_t, double t, double s,
                                  const NoiseModel& model, const StepPlan& plan, bool star) {
    if (s > t) throw Error("homogeneous_evolve_backward: needs s <= t");
    if (t > model.horizon() * (1.0 + 1e-12)) throw Error("homogeneous_evolve: t beyond horizon");
    return homogeneous_impl(v_t, t, s, model, plan, star);
}

} // namespace sns
