#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"

namespace sns {

// One real Brownian driver on a uniform mesh over [0, horizon], stored as
// node values B(t_i) with B(0) = 0. Nodes come from a counter-based
// generator keyed by (seed, channel, refinement level, index), so a path is
// a pure function of its seed. refined() inserts Brownian-bridge midpoints
// and keeps the existing nodes bit-for-bit, which makes coarsening exact:
// coarse increments are literally the sums of the fine ones.
class BrownianPath {
public:
    BrownianPath(double horizon, int cells, uint64_t seed, uint32_t channel);

    double horizon() const { return horizon_; }
    double dt() const { return dt_; }
    int cells() const { return static_cast<int>(nodes_.size()) - 1; }
    uint64_t seed() const { return seed_; }
    uint32_t channel() const { return channel_; }
    int level() const { return level_; }

    const std::vector<double>& increments() const { return inc_; }
    const std::vector<double>& nodes() const { return nodes_; }
    double cell_left_time(int i) const { return dt_ * i; }

    BrownianPath refined() const;              // one bridge halving
    BrownianPath refined_to(double target_dt) const;
    BrownianPath coarsened() const;            // drop odd nodes, exact inverse of refined()

    // B(t), linear interpolation inside a cell (mesh times are exact).
    double value_at(double t) const;

private:
    BrownianPath() = default;
    void rebuild_increments();

    double horizon_ = 0.0;
    double dt_ = 0.0;
    uint64_t seed_ = 0;
    uint32_t channel_ = 0;
    int level_ = 0;
    std::vector<double> nodes_;   // size cells + 1
    std::vector<double> inc_;     // size cells, inc_[i] = nodes_[i+1] - nodes_[i]
};

} // namespace sns
