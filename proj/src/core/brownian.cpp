#include "brownian.hpp"

#include <cmath>

#include "rng.hpp"

namespace sns {

BrownianPath::BrownianPath(double horizon, int cells, uint64_t seed, uint32_t channel)
    : horizon_(horizon), seed_(seed), channel_(channel), level_(0) {
    if (!(horizon > 0.0) || cells < 1) throw ConfigError("brownian: need horizon > 0 and cells >= 1");
    dt_ = horizon / cells;
    nodes_.resize(static_cast<std::size_t>(cells) + 1);
    nodes_[0] = 0.0;
    double sd = std::sqrt(dt_);
    for (int i = 0; i < cells; ++i)
        nodes_[static_cast<std::size_t>(i) + 1] =
            nodes_[static_cast<std::size_t>(i)] +
            sd * gaussian_draw(seed_, channel_, 0, static_cast<uint64_t>(i));
    rebuild_increments();
}

void BrownianPath::rebuild_increments() {
    inc_.resize(nodes_.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) inc_[i] = nodes_[i + 1] - nodes_[i];
}

BrownianPath BrownianPath::refined() const {
    BrownianPath f;
    f.horizon_ = horizon_;
    f.dt_ = 0.5 * dt_;
    f.seed_ = seed_;
    f.channel_ = channel_;
    f.level_ = level_ + 1;
    f.nodes_.resize(2 * (nodes_.size() - 1) + 1);
    double sd = 0.5 * std::sqrt(dt_); // bridge midpoint sd = sqrt(dt/4)
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        double z = sd * gaussian_draw(seed_, channel_, static_cast<uint32_t>(level_ + 1),
                                      static_cast<uint64_t>(i));
        f.nodes_[2 * i] = nodes_[i];
        f.nodes_[2 * i + 1] = 0.5 * (nodes_[i] + nodes_[i + 1]) + z;
    }
    f.nodes_.back() = nodes_.back();
    f.rebuild_increments();
    return f;
}

BrownianPath BrownianPath::refined_to(double target_dt) const {
    BrownianPath p = *this;
    while (p.dt_ > target_dt * (1.0 + 1e-9)) {
        double ratio = p.dt_ / target_dt;
        double r2 = std::round(std::log2(ratio));
        if (std::abs(std::exp2(r2) - ratio) > 1e-9 * ratio)
            throw ConfigError("step dt must divide the Brownian mesh cell as dt = mesh/2^m");
        p = p.refined();
    }
    if (std::abs(p.dt_ - target_dt) > 1e-9 * target_dt)
        throw ConfigError("step dt must divide the Brownian mesh cell as dt = mesh/2^m");
    return p;
}

BrownianPath BrownianPath::coarsened() const {
    if ((nodes_.size() - 1) % 2 != 0 || level_ == 0)
        throw Error("brownian: cannot coarsen a level-0 path");
    BrownianPath c;
    c.horizon_ = horizon_;
    c.dt_ = 2.0 * dt_;
    c.seed_ = seed_;
    c.channel_ = channel_;
    c.level_ = level_ - 1;
    c.nodes_.resize((nodes_.size() - 1) / 2 + 1);
    for (std::size_t i = 0; i < c.nodes_.size(); ++i) c.nodes_[i] = nodes_[2 * i];
    c.rebuild_increments();
    return c;
}

double BrownianPath::value_at(double t) const {
    if (t <= 0.0) return 0.0;
    if (t > horizon_ + 1e-12 * horizon_) throw Error("brownian: evaluation beyond horizon");
    double u = t / dt_;
    int i = static_cast<int>(std::floor(u + 1e-12));
    if (i >= cells()) return nodes_.back();
    double frac = u - i;
    return nodes_[static_cast<std::size_t>(i)] +
           frac * (nodes_[static_cast<std::size_t>(i) + 1] - nodes_[static_cast<std::size_t>(i)]);
}

} // namespace sns
