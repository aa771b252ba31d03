#include "noise.hpp"

#include <algorithm>
#include <cmath>

namespace sns {

NoiseModel::NoiseModel(std::vector<std::pair<SpatialProfile, TemporalProfile>> channels,
                       int lambda, double horizon, int mesh_cells, uint64_t seed)
    : lambda_(lambda), horizon_(horizon), seed_(seed) {
    if (lambda < -1 || lambda > 1) throw ConfigError("noise: lambda must be -1, 0 or +1");
    if (!(horizon > 0.0)) throw ConfigError("noise: horizon must be positive");
    channels_.reserve(channels.size());
    uint32_t k = 0;
    for (auto& ch : channels) {
        channels_.push_back(NoiseChannel{ch.first, ch.second,
                                         BrownianPath(horizon, mesh_cells, seed, k)});
        ++k;
    }
    build_caches();
}

NoiseModel::NoiseModel(std::vector<NoiseChannel> channels, int lambda, double horizon)
    : channels_(std::move(channels)), lambda_(lambda), horizon_(horizon) {
    for (const auto& ch : channels_) {
        if (std::abs(ch.path.horizon() - horizon_) > 1e-12 * horizon_)
            throw ConfigError("noise: all paths share the [0, horizon] mesh");
        if (!channels_.empty() && ch.path.cells() != channels_.front().path.cells())
            throw ConfigError("noise: all paths share one mesh");
    }
    if (!channels_.empty()) seed_ = channels_.front().path.seed();
    build_caches();
}

void NoiseModel::build_caches() {
    if (channels_.empty()) { mesh_dt_ = horizon_; cells_ = 1; return; }
    cells_ = channels_.front().path.cells();
    mesh_dt_ = channels_.front().path.dt();
    I_.assign(channels_.size(), {});
    J_.assign(channels_.size(), {});
    for (std::size_t k = 0; k < channels_.size(); ++k) {
        const auto& path = channels_[k].path;
        const auto& g = channels_[k].temporal;
        auto& I = I_[k];
        auto& J = J_[k];
        I.assign(static_cast<std::size_t>(cells_) + 1, 0.0);
        J.assign(static_cast<std::size_t>(cells_) + 1, 0.0);
        for (int i = 0; i < cells_; ++i) {
            double tl = path.cell_left_time(i);
            double tr = tl + mesh_dt_;
            double gl = g(tl), gr = g(tr);
            I[static_cast<std::size_t>(i) + 1] =
                I[static_cast<std::size_t>(i)] + gl * path.increments()[static_cast<std::size_t>(i)];
            J[static_cast<std::size_t>(i) + 1] =
                J[static_cast<std::size_t>(i)] + 0.5 * (gl * gl + gr * gr) * mesh_dt_;
        }
    }
}

bool NoiseModel::conservative() const {
    for (const auto& ch : channels_)
        if (!ch.spatial.is_conservative()) return false;
    return true;
}

bool NoiseModel::constant_profiles() const {
    for (const auto& ch : channels_)
        if (!ch.spatial.is_constant()) return false;
    return true;
}

NoiseModel NoiseModel::refined_to(double dt) const {
    std::vector<NoiseChannel> chans;
    chans.reserve(channels_.size());
    for (const auto& ch : channels_)
        chans.push_back(NoiseChannel{ch.spatial, ch.temporal, ch.path.refined_to(dt)});
    NoiseModel m(std::move(chans), lambda_, horizon_);
    m.seed_ = seed_;
    return m;
}

void NoiseModel::check_time(double t) const {
    if (t < -1e-12 || t > horizon_ * (1.0 + 1e-12))
        throw Error("noise: time beyond the mesh horizon");
}

double NoiseModel::ito_integral(int k, double t) const {
    check_time(t);
    const auto& I = I_[static_cast<std::size_t>(k)];
    const auto& ch = channels_[static_cast<std::size_t>(k)];
    double u = t / mesh_dt_;
    int full = std::min(static_cast<int>(std::floor(u + 1e-12)), cells_);
    double v = I[static_cast<std::size_t>(full)];
    double frac = u - full;
    if (full < cells_ && frac > 1e-12) {
        double tl = ch.path.cell_left_time(full);
        v += ch.temporal(tl) * ch.path.increments()[static_cast<std::size_t>(full)] * frac;
    }
    return v;
}

double NoiseModel::ds_integral(int k, double t) const {
    check_time(t);
    const auto& J = J_[static_cast<std::size_t>(k)];
    const auto& ch = channels_[static_cast<std::size_t>(k)];
    double u = t / mesh_dt_;
    int full = std::min(static_cast<int>(std::floor(u + 1e-12)), cells_);
    double v = J[static_cast<std::size_t>(full)];
    double frac = u - full;
    if (full < cells_ && frac > 1e-12) {
        double tl = ch.path.cell_left_time(full);
        double gl = ch.temporal(tl), gt = ch.temporal(t);
        v += 0.5 * (gl * gl + gt * gt) * (t - tl);
    }
    return v;
}

double NoiseModel::ito_integral_star(int k, double t) const {
    return ito_integral(k, horizon_) - ito_integral(k, t);
}

double NoiseModel::ds_integral_star(int k, double t) const {
    return ds_integral(k, horizon_) - ds_integral(k, t);
}

Field NoiseModel::phi(double t, const Grid& g) const {
    Field out(g);
    for (int k = 0; k < N(); ++k) {
        const auto& sp = channels_[static_cast<std::size_t>(k)].spatial;
        double Ik = ito_integral(k, t);
        double Jk = ds_integral(k, t);
        Field pk = sp.evaluate(g);
        Field rk = sp.rho().evaluate(g);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.values[i] += pk.values[i] * Ik - rk.values[i] * Jk;
    }
    return out;
}

Field NoiseModel::phi_star(double t, const Grid& g) const {
    // phi_*(t) = phi(t) - phi(horizon): the (vf*) integrals from t to the horizon.
    Field out(g);
    for (int k = 0; k < N(); ++k) {
        const auto& sp = channels_[static_cast<std::size_t>(k)].spatial;
        double Ik = -ito_integral_star(k, t);
        double Jk = -ds_integral_star(k, t);
        Field pk = sp.evaluate(g);
        Field rk = sp.rho().evaluate(g);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.values[i] += pk.values[i] * Ik - rk.values[i] * Jk;
    }
    return out;
}

Field NoiseModel::mu(double t, const Grid& g) const {
    Field out(g);
    for (int k = 0; k < N(); ++k) {
        const auto& ch = channels_[static_cast<std::size_t>(k)];
        double gt = ch.temporal(t);
        Field pk = ch.spatial.evaluate(g);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.values[i] += 0.5 * gt * gt * std::norm(pk.values[i]);
    }
    return out;
}

Field NoiseModel::mu_hat(double t, const Grid& g) const {
    Field out(g);
    for (int k = 0; k < N(); ++k) {
        const auto& ch = channels_[static_cast<std::size_t>(k)];
        double gt = ch.temporal(t);
        Field rk = ch.spatial.rho().evaluate(g);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.values[i] += gt * gt * rk.values[i];
    }
    return out;
}

double NoiseModel::re_phi_uniform(double t, double v1_scale) const {
    if (!constant_profiles()) throw Error("noise: uniform phi needs constant profiles");
    double acc = 0.0;
    for (int k = 0; k < N(); ++k) {
        double re_v = channels_[static_cast<std::size_t>(k)].spatial.amplitude().real();
        if (k == 0) re_v *= v1_scale;
        acc += re_v * ito_integral(k, t) - re_v * re_v * ds_integral(k, t);
    }
    return acc;
}

cplx NoiseModel::phi_uniform(double t) const {
    if (!constant_profiles()) throw Error("noise: uniform phi needs constant profiles");
    cplx acc(0.0, 0.0);
    for (int k = 0; k < N(); ++k) {
        cplx v = channels_[static_cast<std::size_t>(k)].spatial.amplitude();
        cplx rho = v.real() * v;
        acc += v * ito_integral(k, t) - rho * ds_integral(k, t);
    }
    return acc;
}

namespace {

struct ChannelScalars {
    double I, J;
};

// b_j = sgn * 2 sum_k [ d_j phi_k I_k - d_j rho_k J_k ]; star flips sign and
// swaps (I,J) for the tail integrals.
std::vector<Field> coeff_b_impl(const NoiseModel& m, double t, const Grid& g, bool star) {
    std::vector<Field> out;
    for (int a = 0; a < g.d(); ++a) out.emplace_back(g);
    double sgn = star ? -2.0 : 2.0;
    for (int k = 0; k < m.N(); ++k) {
        const auto& sp = m.channel(k).spatial;
        auto rp = sp.rho();
        double Ik = star ? m.ito_integral_star(k, t) : m.ito_integral(k, t);
        double Jk = star ? m.ds_integral_star(k, t) : m.ds_integral(k, t);
        double x[3];
        cplx gp[3], gr[3];
        for (std::size_t i = 0; i < out[0].size(); ++i) {
            auto ii = g.unflatten(i);
            for (int a = 0; a < g.d(); ++a) x[a] = g.position(ii[static_cast<std::size_t>(a)]);
            sp.grad(x, g.d(), gp);
            rp.grad(x, g.d(), gr);
            for (int a = 0; a < g.d(); ++a)
                out[static_cast<std::size_t>(a)].values[i] += sgn * (gp[a] * Ik - gr[a] * Jk);
        }
    }
    return out;
}

Field coeff_c_impl(const NoiseModel& m, double t, const Grid& g, bool star) {
    Field out(g);
    // first term: sum_j ( sum_k [d_j phi_k I~_k - d_j rho_k J~_k] )^2 with the
    // t..horizon integrals when star; second: -+ sum_k [Delta phi_k I~ - Delta rho_k J~]
    std::vector<std::vector<cplx>> S(static_cast<std::size_t>(g.d()),
                                     std::vector<cplx>(out.size(), cplx(0, 0)));
    std::vector<cplx> lap(out.size(), cplx(0, 0));
    for (int k = 0; k < m.N(); ++k) {
        const auto& sp = m.channel(k).spatial;
        auto rp = sp.rho();
        double Ik = star ? m.ito_integral_star(k, t) : m.ito_integral(k, t);
        double Jk = star ? m.ds_integral_star(k, t) : m.ds_integral(k, t);
        double x[3];
        cplx gp[3], gr[3];
        for (std::size_t i = 0; i < out.size(); ++i) {
            auto ii = g.unflatten(i);
            for (int a = 0; a < g.d(); ++a) x[a] = g.position(ii[static_cast<std::size_t>(a)]);
            sp.grad(x, g.d(), gp);
            rp.grad(x, g.d(), gr);
            for (int a = 0; a < g.d(); ++a)
                S[static_cast<std::size_t>(a)][i] += gp[a] * Ik - gr[a] * Jk;
            lap[i] += sp.laplacian(x, g.d()) * Ik - rp.laplacian(x, g.d()) * Jk;
        }
    }
    double lap_sgn = star ? -1.0 : 1.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        cplx sq(0.0, 0.0);
        for (int a = 0; a < g.d(); ++a) {
            cplx s = S[static_cast<std::size_t>(a)][i];
            sq += s * s;
        }
        out.values[i] = sq + lap_sgn * lap[i];
    }
    return out;
}

} // namespace

std::vector<Field> NoiseModel::coeff_b(double t, const Grid& g) const {
    check_time(t);
    return coeff_b_impl(*this, t, g, false);
}

Field NoiseModel::coeff_c(double t, const Grid& g) const {
    check_time(t);
    return coeff_c_impl(*this, t, g, false);
}

std::vector<Field> NoiseModel::coeff_b_star(double t, const Grid& g) const {
    check_time(t);
    return coeff_b_impl(*this, t, g, true);
}

Field NoiseModel::coeff_c_star(double t, const Grid& g) const {
    check_time(t);
    return coeff_c_impl(*this, t, g, true);
}

FlatnessReport NoiseModel::flatness_report(const std::vector<double>& t_list, const Grid& g,
                                           bool star) const {
    FlatnessReport rep;
    rep.star = star;
    const int d = g.d();
    for (double t : t_list) {
        check_time(t);
        std::vector<double> bsup(3, 0.0); // |beta| = 0,1,2 for b
        std::vector<double> csup(2, 0.0); // |gamma| = 0,1 for c

        // accumulate sums over channels at each grid point
        double x[3];
        cplx gp[3], gr[3], hp[9], hr[9];
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto ii = g.unflatten(i);
            double r2 = 0.0;
            for (int a = 0; a < d; ++a) {
                x[a] = g.position(ii[static_cast<std::size_t>(a)]);
                r2 += x[a] * x[a];
            }
            double w = 1.0 + r2; // <x>^2

            cplx b0[3] = {0, 0, 0};
            cplx b1[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
            double b2max = 0.0;
            cplx cS[3] = {0, 0, 0};
            cplx cLap(0, 0);
            cplx cS_grad[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
            cplx cLap_grad[3] = {0, 0, 0};

            for (int k = 0; k < N(); ++k) {
                const auto& sp = channels_[static_cast<std::size_t>(k)].spatial;
                auto rp = sp.rho();
                double Ik = star ? ito_integral_star(k, t) : ito_integral(k, t);
                double Jk = star ? ds_integral_star(k, t) : ds_integral(k, t);
                sp.grad(x, d, gp);
                rp.grad(x, d, gr);
                sp.hessian(x, d, hp);
                rp.hessian(x, d, hr);
                for (int a = 0; a < d; ++a) {
                    cplx s = gp[a] * Ik - gr[a] * Jk;
                    b0[a] += 2.0 * s;
                    cS[a] += s;
                }
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) {
                        cplx h = hp[a * d + b] * Ik - hr[a * d + b] * Jk;
                        b1[a * d + b] += 2.0 * h;
                        cS_grad[a * d + b] += h;
                    }
                cLap += sp.laplacian(x, d) * Ik - rp.laplacian(x, d) * Jk;
                for (int a = 0; a < d; ++a) {
                    cplx tr(0, 0);
                    for (int b = 0; b < d; ++b)
                        tr += sp.third(x, d, a, b, b) * Ik - rp.third(x, d, a, b, b) * Jk;
                    cLap_grad[a] += tr;
                }
                // second derivatives of b: thirds of phi
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        for (int c = 0; c < d; ++c) {
                            cplx th = sp.third(x, d, a, b, c) * Ik - rp.third(x, d, a, b, c) * Jk;
                            b2max = std::max(b2max, std::abs(2.0 * th));
                        }
            }
            for (int a = 0; a < d; ++a) bsup[0] = std::max(bsup[0], w * std::abs(b0[a]));
            for (int a = 0; a < d * d; ++a) bsup[1] = std::max(bsup[1], w * std::abs(b1[a]));
            bsup[2] = std::max(bsup[2], w * b2max);

            // c and grad c from S and Lap pieces
            cplx cval(0, 0);
            for (int a = 0; a < d; ++a) cval += cS[a] * cS[a];
            cval += (star ? -1.0 : 1.0) * cLap;
            csup[0] = std::max(csup[0], w * std::abs(cval));
            for (int a = 0; a < d; ++a) {
                cplx dc(0, 0);
                for (int b = 0; b < d; ++b) dc += 2.0 * cS[b] * cS_grad[b * d + a];
                dc += (star ? -1.0 : 1.0) * cLap_grad[a];
                csup[1] = std::max(csup[1], w * std::abs(dc));
            }
        }
        for (int o = 0; o < 3; ++o) rep.rows.push_back({t, 'b', o, bsup[static_cast<std::size_t>(o)]});
        for (int o = 0; o < 2; ++o) rep.rows.push_back({t, 'c', o, csup[static_cast<std::size_t>(o)]});
    }
    return rep;
}

double NoiseModel::epsilon_theta(double v1_scale, double theta, double horizon, bool lensed,
                                 int d, double alpha) const {
    if (!(theta > 1.0)) throw Error("epsilon_theta: theta must exceed 1");
    if (!(horizon > 0.0) || horizon > horizon_ * (1.0 + 1e-12))
        throw Error("epsilon_theta: horizon must lie within the mesh horizon");
    if (N() > 0 && !constant_profiles())
        throw Error("epsilon_theta: defined for constant (H2) profiles");
    double tpow = -0.5 * (d * (alpha - 1.0) - 4.0) * theta - 2.0;
    auto integrand = [&](double s) {
        double e = (N() > 0) ? std::exp((alpha - 1.0) * theta * re_phi_uniform(s, v1_scale)) : 1.0;
        return lensed ? std::pow(1.0 + s, tpow) * e : e;
    };
    // trapezoid on the mesh subdivided to at least 4096 quadrature cells, so
    // the (1+s)-weight is resolved even on coarse Brownian meshes; Re phi is
    // piecewise linear between nodes, so subdivision stays path-consistent
    double h = mesh_dt_;
    int sub = 1;
    while (horizon / (h / sub) < 4096.0 && sub < (1 << 20)) sub *= 2;
    h = mesh_dt_ / sub;
    int cells = static_cast<int>(std::floor(horizon / h + 1e-9));
    double acc = 0.0;
    double prev = integrand(0.0);
    for (int i = 1; i <= cells; ++i) {
        double s = i * h;
        double cur = integrand(s);
        acc += 0.5 * (prev + cur) * h;
        prev = cur;
    }
    double rest = horizon - cells * h;
    if (rest > 1e-12 * horizon_) acc += 0.5 * (prev + integrand(horizon)) * rest;
    return acc;
}

std::vector<double> NoiseModel::ilog_diagnostic(const std::vector<double>& lens_times) const {
    // (1-t)^(-3) ( int_{t/(1-t)}^inf g^2 ds * ln ln (int ...)^(-1) )^(1/2),
    // tails in closed form, ln ln arguments clamped below e to e.
    const double e = std::exp(1.0);
    std::vector<double> out;
    out.reserve(lens_times.size());
    for (double t : lens_times) {
        if (!(t >= 0.0 && t < 1.0)) throw Error("ilog: lens time must lie in [0,1)");
        double s = t / (1.0 - t);
        double acc = 0.0;
        for (const auto& ch : channels_) {
            double tail = ch.temporal.sq_tail(s);
            if (!(tail > 0.0)) continue;
            double ll = std::log(std::log(std::max(1.0 / tail, e)));
            acc += tail * ll;
        }
        out.push_back(std::pow(1.0 - t, -3.0) * std::sqrt(acc));
    }
    return out;
}

std::vector<double> NoiseModel::tail_bounds() const {
    std::vector<double> out;
    for (const auto& ch : channels_) out.push_back(ch.temporal.sq_tail(horizon_));
    return out;
}

} // namespace sns
