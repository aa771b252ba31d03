#include "functionals.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace sns {

double mass(const Field& f) {
    double acc = 0.0;
    for (const auto& v : f.values) acc += std::norm(v);
    return acc * f.grid.cell_volume();
}

double hamiltonian(const Field& f, double alpha, double lambda) {
    double grad2 = 0.0;
    for (const auto& gf : gradient(f))
        for (const auto& v : gf.values) grad2 += std::norm(v);
    grad2 *= f.grid.cell_volume();
    double pa = 0.0;
    for (const auto& v : f.values) pa += std::pow(std::abs(v), alpha + 1.0);
    pa *= f.grid.cell_volume();
    return 0.5 * grad2 - lambda / (alpha + 1.0) * pa;
}

double virial(const Field& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f.grid.radius_sq(i) * std::norm(f.values[i]);
    return acc * f.grid.cell_volume();
}

double momentum(const Field& f) {
    auto grads = gradient(f);
    const Grid& g = f.grid;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto ii = g.unflatten(i);
        cplx term(0.0, 0.0);
        for (int a = 0; a < g.d(); ++a) {
            double x = g.position(ii[static_cast<std::size_t>(a)]);
            term += x * std::conj(grads[static_cast<std::size_t>(a)].values[i]);
        }
        acc += std::imag(term * f.values[i]);
    }
    return acc * g.cell_volume();
}

double pc_energy(const Field& f, double s, double alpha) {
    if (!(s >= 0.0)) throw Error("pc_energy: s must be nonnegative");
    const Grid& g = f.grid;
    auto grads = gradient(f);
    double vol = g.cell_volume();

    double direct = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto ii = g.unflatten(i);
        for (int a = 0; a < g.d(); ++a) {
            double x = g.position(ii[static_cast<std::size_t>(a)]);
            cplx w = x * f.values[i] - cplx(0.0, 2.0 * (1.0 + s)) * grads[static_cast<std::size_t>(a)].values[i];
            direct += std::norm(w);
        }
    }
    direct *= vol;
    double pa = 0.0;
    for (const auto& v : f.values) pa += std::pow(std::abs(v), alpha + 1.0);
    pa *= vol;
    direct += 8.0 / (1.0 + alpha) * (1.0 + s) * (1.0 + s) * pa;

    // Lemma 2.2 decomposition with the defocusing Hamiltonian
    double decomposition = 8.0 * (1.0 + s) * (1.0 + s) * hamiltonian(f, alpha, -1.0) -
                           4.0 * (1.0 + s) * momentum(f) + virial(f);
    double scale = std::max({std::abs(direct), std::abs(decomposition), 1e-30});
    if (std::abs(direct - decomposition) > 1e-8 * scale)
        throw ConsistencyError("pc_energy: direct and decomposed values disagree beyond 1e-8");
    return direct;
}

const char* functional_name(Functional which) {
    switch (which) {
        case Functional::Mass: return "mass";
        case Functional::Hamiltonian: return "hamiltonian";
        case Functional::Virial: return "virial";
        case Functional::Momentum: return "momentum";
        case Functional::PcEnergy: return "pc_energy";
    }
    return "?";
}

namespace {

struct ChannelFields {
    std::vector<cplx> phi;    // phi_k on the grid
    std::vector<cplx> dphi[3];
};

// sigma_{0,k} = 2 int Re G_k |X|^2
double sigma0(const Field& f, const std::vector<cplx>& phi, double gt) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += phi[i].real() * std::norm(f.values[i]);
    return 2.0 * gt * acc * f.grid.cell_volume();
}

} // namespace

ItoTerms ito_integrands(const Field& f, const NoiseModel& model, double t, Functional which,
                        double alpha) {
    const Grid& g = f.grid;
    const int d = g.d();
    const double vol = g.cell_volume();
    const double lambda = model.lambda();
    ItoTerms out;
    out.sigma.assign(static_cast<std::size_t>(model.N()), 0.0);

    auto grads = gradient(f);

    // per-channel spatial data
    std::vector<ChannelFields> ch(static_cast<std::size_t>(model.N()));
    std::vector<double> gval(static_cast<std::size_t>(model.N()));
    for (int k = 0; k < model.N(); ++k) {
        const auto& sp = model.channel(k).spatial;
        ch[static_cast<std::size_t>(k)].phi = sp.evaluate(g).values;
        for (int a = 0; a < d; ++a)
            ch[static_cast<std::size_t>(k)].dphi[a] = sp.evaluate_gradient(g, a).values;
        gval[static_cast<std::size_t>(k)] = model.channel(k).temporal(t);
    }

    double pa = 0.0; // |f|_{alpha+1}^{alpha+1}
    for (const auto& v : f.values) pa += std::pow(std::abs(v), alpha + 1.0);
    pa *= vol;

    auto hamiltonian_terms = [&](double lam, double& a1, std::vector<double>& s1) {
        // a_1 = -Re int grad X~ grad(mu X) + 1/2 sum_k int |grad(G_k X)|^2
        //       - lam (alpha-1)/2 sum_k int (Re G_k)^2 |X|^{alpha+1}
        // sigma_{1,k} = Re int grad X~ grad(G_k X) - lam int Re G_k |X|^{alpha+1}
        Field mu = model.mu(t, g);
        std::vector<std::vector<cplx>> dmu(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) {
            std::vector<cplx> da(g.size(), cplx(0, 0));
            for (int k = 0; k < model.N(); ++k) {
                auto asq = model.channel(k).spatial.abs_sq();
                Field dk = asq.evaluate_gradient(g, a);
                double w = 0.5 * gval[static_cast<std::size_t>(k)] * gval[static_cast<std::size_t>(k)];
                for (std::size_t i = 0; i < da.size(); ++i) da[i] += w * dk.values[i];
            }
            dmu[static_cast<std::size_t>(a)] = std::move(da);
        }
        double term_mu = 0.0;
        for (int a = 0; a < d; ++a) {
            const auto& gr = grads[static_cast<std::size_t>(a)].values;
            for (std::size_t i = 0; i < g.size(); ++i) {
                cplx grad_muX = dmu[static_cast<std::size_t>(a)][i] * f.values[i] +
                                mu.values[i] * gr[i];
                term_mu += std::real(std::conj(gr[i]) * grad_muX);
            }
        }
        term_mu *= vol;

        a1 = -term_mu;
        for (int k = 0; k < model.N(); ++k) {
            double gt = gval[static_cast<std::size_t>(k)];
            double norm_gradGX = 0.0;
            double re_pair = 0.0;
            for (int a = 0; a < d; ++a) {
                const auto& gr = grads[static_cast<std::size_t>(a)].values;
                const auto& dp = ch[static_cast<std::size_t>(k)].dphi[a];
                const auto& pk = ch[static_cast<std::size_t>(k)].phi;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    cplx gradGX = gt * (dp[i] * f.values[i] + pk[i] * gr[i]);
                    norm_gradGX += std::norm(gradGX);
                    re_pair += std::real(std::conj(gr[i]) * gradGX);
                }
            }
            norm_gradGX *= vol;
            re_pair *= vol;
            double re_g2_pa = 0.0;
            const auto& pk = ch[static_cast<std::size_t>(k)].phi;
            for (std::size_t i = 0; i < g.size(); ++i) {
                double re_gk = gt * pk[i].real();
                re_g2_pa += re_gk * re_gk * std::pow(std::abs(f.values[i]), alpha + 1.0);
            }
            re_g2_pa *= vol;
            double re_gk_pa = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                re_gk_pa += gt * pk[i].real() * std::pow(std::abs(f.values[i]), alpha + 1.0);
            re_gk_pa *= vol;

            a1 += 0.5 * norm_gradGX - lam * (alpha - 1.0) / 2.0 * re_g2_pa;
            s1[static_cast<std::size_t>(k)] = re_pair - lam * re_gk_pa;
        }
    };

    auto momentum_terms = [&](double lam, double& drift, std::vector<double>& s3) {
        // drift = 4 H + 4 lam/(alpha+1) (1 - d(alpha-1)/4) |X|^{alpha+1} + a_3
        // a_3 = - sum_k Im int x.grad(G_k) |X|^2 G_k~
        // sigma_{3,k} = d int |X|^2 Im G_k - 2 Im int x.grad(X) X~ G_k~
        double a3 = 0.0;
        for (int k = 0; k < model.N(); ++k) {
            double gt = gval[static_cast<std::size_t>(k)];
            const auto& pk = ch[static_cast<std::size_t>(k)].phi;
            double acc = 0.0;
            double s3_1 = 0.0, s3_2 = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                auto ii = g.unflatten(i);
                cplx xdotdG(0, 0), xdotgradX(0, 0);
                for (int a = 0; a < d; ++a) {
                    double x = g.position(ii[static_cast<std::size_t>(a)]);
                    xdotdG += x * ch[static_cast<std::size_t>(k)].dphi[a][i];
                    xdotgradX += x * grads[static_cast<std::size_t>(a)].values[i];
                }
                cplx Gk = gt * pk[i];
                acc += std::imag(gt * xdotdG * std::norm(f.values[i]) * std::conj(Gk));
                s3_1 += std::norm(f.values[i]) * Gk.imag();
                s3_2 += std::imag(xdotgradX * std::conj(f.values[i]) * std::conj(Gk));
            }
            a3 -= acc * vol;
            s3[static_cast<std::size_t>(k)] = d * s3_1 * vol - 2.0 * s3_2 * vol;
        }
        drift = 4.0 * hamiltonian(f, alpha, lam) +
                4.0 * lam / (alpha + 1.0) * (1.0 - d * (alpha - 1.0) / 4.0) * pa + a3;
    };

    switch (which) {
        case Functional::Mass: {
            out.drift = 0.0;
            for (int k = 0; k < model.N(); ++k)
                out.sigma[static_cast<std::size_t>(k)] =
                    sigma0(f, ch[static_cast<std::size_t>(k)].phi, gval[static_cast<std::size_t>(k)]);
            break;
        }
        case Functional::Hamiltonian: {
            double a1;
            hamiltonian_terms(lambda, a1, out.sigma);
            out.drift = a1;
            break;
        }
        case Functional::Virial: {
            out.drift = 4.0 * momentum(f);
            for (int k = 0; k < model.N(); ++k) {
                double gt = gval[static_cast<std::size_t>(k)];
                const auto& pk = ch[static_cast<std::size_t>(k)].phi;
                double acc = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i)
                    acc += gt * pk[i].real() * g.radius_sq(i) * std::norm(f.values[i]);
                out.sigma[static_cast<std::size_t>(k)] = 2.0 * acc * vol;
            }
            break;
        }
        case Functional::Momentum: {
            momentum_terms(lambda, out.drift, out.sigma);
            break;
        }
        case Functional::PcEnergy: {
            if (model.lambda() != -1)
                throw Error("pc_energy identity is implemented for lambda = -1 only");
            double a1;
            std::vector<double> s1(static_cast<std::size_t>(model.N()), 0.0);
            hamiltonian_terms(-1.0, a1, s1);
            double drift3;
            std::vector<double> s3(static_cast<std::size_t>(model.N()), 0.0);
            momentum_terms(-1.0, drift3, s3);
            // a(r) = 8(1+r)^2 a_1 - 4(1+r) a_3; recover a_3 from the momentum drift
            double a3 = drift3 - 4.0 * hamiltonian(f, alpha, -1.0) +
                        4.0 / (alpha + 1.0) * (1.0 - d * (alpha - 1.0) / 4.0) * pa;
            double r = t;
            out.drift = 8.0 * (1.0 + r) * (1.0 + r) * a1 - 4.0 * (1.0 + r) * a3 +
                        16.0 / (alpha + 1.0) * (1.0 - d * (alpha - 1.0) / 4.0) * (1.0 + r) * pa;
            for (int k = 0; k < model.N(); ++k) {
                double gt = gval[static_cast<std::size_t>(k)];
                const auto& pk = ch[static_cast<std::size_t>(k)].phi;
                double s2 = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i)
                    s2 += gt * pk[i].real() * g.radius_sq(i) * std::norm(f.values[i]);
                s2 *= 2.0 * vol;
                out.sigma[static_cast<std::size_t>(k)] =
                    8.0 * (1.0 + r) * (1.0 + r) * s1[static_cast<std::size_t>(k)] -
                    4.0 * (1.0 + r) * s3[static_cast<std::size_t>(k)] + s2;
            }
            break;
        }
    }
    return out;
}

namespace {
double functional_value(const Field& f, Functional which, double alpha, double lambda, double t) {
    switch (which) {
        case Functional::Mass: return mass(f);
        case Functional::Hamiltonian: return hamiltonian(f, alpha, lambda);
        case Functional::Virial: return virial(f);
        case Functional::Momentum: return momentum(f);
        case Functional::PcEnergy: return pc_energy(f, t, alpha);
    }
    return 0.0;
}
} // namespace

ItoLedger ito_replay(const Trajectory& traj, const NoiseModel& model, Functional which) {
    const NoiseModel& m = traj.model_used ? *traj.model_used : model;
    if (m.N() > 0 && static_cast<int>(traj.increments.size()) != m.N())
        throw Error("ito_replay: trajectory carries no increments");
    ItoLedger led;
    led.which = which;
    const std::size_t nsnap = traj.series.times.size();
    led.times = traj.series.times;
    led.stoch_cum.assign(static_cast<std::size_t>(m.N()),
                         std::vector<double>(nsnap, 0.0));
    led.value.resize(nsnap);
    led.drift_cum.resize(nsnap);
    led.residual.resize(nsnap);

    std::vector<double> drift_at(nsnap, 0.0);
    std::vector<std::vector<double>> sigma_at(nsnap);
    for (std::size_t j = 0; j < nsnap; ++j) {
        double t = traj.series.times[j];
        const Field& f = traj.series.fields[j];
        led.value[j] = functional_value(f, which, traj.alpha, traj.lambda, t);
        ItoTerms terms = ito_integrands(f, m, t, which, traj.alpha);
        drift_at[j] = terms.drift;
        sigma_at[j] = terms.sigma;
    }

    double drift = 0.0;
    std::vector<double> stoch(static_cast<std::size_t>(m.N()), 0.0);
    led.drift_cum[0] = 0.0;
    led.residual[0] = 0.0;
    for (std::size_t j = 0; j + 1 < nsnap; ++j) {
        double dtj = traj.series.times[j + 1] - traj.series.times[j];
        drift += 0.5 * (drift_at[j] + drift_at[j + 1]) * dtj;
        // aggregate the consumed increments over this snapshot interval
        for (int k = 0; k < m.N(); ++k) {
            double db = 0.0;
            for (std::size_t s = traj.snapshot_step[j]; s < traj.snapshot_step[j + 1]; ++s)
                db += traj.increments[static_cast<std::size_t>(k)][s];
            stoch[static_cast<std::size_t>(k)] += sigma_at[j][static_cast<std::size_t>(k)] * db;
        }
        led.drift_cum[j + 1] = drift;
        double stoch_total = 0.0;
        for (int k = 0; k < m.N(); ++k) {
            led.stoch_cum[static_cast<std::size_t>(k)][j + 1] = stoch[static_cast<std::size_t>(k)];
            stoch_total += stoch[static_cast<std::size_t>(k)];
        }
        led.residual[j + 1] = led.value[j + 1] - led.value[0] - drift - stoch_total;
    }
    return led;
}

void write_ledger_csv(const ItoLedger& ledger, const std::string& path,
                      const std::string& header_comment) {
    std::ofstream os(path);
    if (!os) throw Error("write_ledger_csv: cannot open " + path);
    if (!header_comment.empty()) os << "# " << header_comment << "\n";
    os << "t,value,drift_cum";
    for (std::size_t k = 0; k < ledger.stoch_cum.size(); ++k) os << ",stoch_cum_" << k + 1;
    os << ",residual\n";
    char buf[64];
    for (std::size_t j = 0; j < ledger.times.size(); ++j) {
        auto put = [&](double v, bool lead_comma) {
            std::snprintf(buf, sizeof(buf), "%s%.17g", lead_comma ? "," : "", v);
            os << buf;
        };
        put(ledger.times[j], false);
        put(ledger.value[j], true);
        put(ledger.drift_cum[j], true);
        for (std::size_t k = 0; k < ledger.stoch_cum.size(); ++k) put(ledger.stoch_cum[k][j], true);
        put(ledger.residual[j], true);
        os << "\n";
    }
}

} // namespace sns
