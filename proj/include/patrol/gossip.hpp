#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "patrol/comms.hpp"
#include "patrol/env.hpp"

namespace patrol {

// Per-agent estimates of the global reward at every time of the current
// rollout: a T0 x M bit matrix, row tau holding the agent's current belief
// about r(S_tau). Bits only ever turn on, never off, and never exceed the
// true reward. Buffers are cleared at every rollout boundary.
class RewardBuffer {
public:
    RewardBuffer() = default;
    RewardBuffer(int agent, long rollout_start, int t0, int m);

    int agent() const { return agent_; }
    long rollout_start() const { return rollout_start_; }
    int t0() const { return t0_; }
    int n_tasks() const { return m_; }

    bool bit(long tau, int m) const;
    bool row_initialized(long tau) const;
    int rows_initialized() const { return rows_init_; }

    // Row tau = t from the agent's own zone observation.
    // Throws UsageError if the row was already initialized.
    void set_own_row(long t, const std::vector<std::uint8_t>& indicator);

    // Column sums over all rows; requires the rollout to be complete.
    std::vector<double> column_sums() const;

    // Word-level access used by the exchange step.
    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }
    int n_words() const { return static_cast<int>(words_.size()); }

private:
    int agent_ = 0;
    long rollout_start_ = 0;
    int t0_ = 0;
    int m_ = 0;
    int rows_init_ = 0;
    std::vector<std::uint64_t> words_;
};

// Local observation at t: sets row tau = t to the agent's own
// zone-membership indicator.
void observe_local(RewardBuffer& buffer, long t, Vec2 own_position, const FloorPlan& plan);

// One synchronous gossip round at the sample's time t: for every agent and
// every row tau < t, the new bit is the OR over the agent and its active
// neighbors of the bits they held at t-1. All reads happen before any write.
void exchange(std::vector<RewardBuffer>& buffers, const GraphSample& sample);

// End-of-rollout estimate sums consumed by the dual update.
std::vector<double> finalize(const RewardBuffer& buffer);

// Orchestrates the buffers of all agents across a rollout and accounts for
// the wire payload under delta encoding: an edge carries only the (tau, m)
// bits the sender has not previously pushed over that edge.
class GossipSession {
public:
    using TraceSink = std::function<void(long t, int sender, int receiver, int payload_bits)>;

    GossipSession(int n_agents, int t0, int m);

    void start_rollout(long rollout_start);
    void observe(int agent, long t, const std::vector<std::uint8_t>& indicator);
    void exchange(const GraphSample& sample);
    std::vector<double> finalize(int agent) const;

    const RewardBuffer& buffer(int agent) const { return buffers_[agent]; }
    long rollout_start() const { return rollout_start_; }
    std::uint64_t total_payload_bits() const { return total_payload_bits_; }
    void set_trace_sink(TraceSink sink) { trace_ = std::move(sink); }

private:
    int n_agents_;
    int t0_;
    int m_;
    long rollout_start_ = 0;
    std::vector<RewardBuffer> buffers_;
    // shared_[sender][receiver]: bits already pushed over that directed edge.
    std::vector<std::vector<std::vector<std::uint64_t>>> shared_;
    std::uint64_t total_payload_bits_ = 0;
    TraceSink trace_;
};

}  // namespace patrol
