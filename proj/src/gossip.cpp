#include "patrol/gossip.hpp"

#include <bit>
#include <string>

#include "patrol/errors.hpp"

namespace patrol {

RewardBuffer::RewardBuffer(int agent, long rollout_start, int t0, int m)
    : agent_(agent), rollout_start_(rollout_start), t0_(t0), m_(m) {
    if (t0 <= 0 || m <= 0) throw UsageError("reward buffer needs T0 >= 1 and M >= 1");
    words_.assign((static_cast<std::size_t>(t0) * m + 63) / 64, 0);
}

bool RewardBuffer::bit(long tau, int m) const {
    const long row = tau - rollout_start_;
    if (row < 0 || row >= t0_ || m < 0 || m >= m_) throw UsageError("buffer index out of range");
    const std::size_t idx = static_cast<std::size_t>(row) * m_ + m;
    return (words_[idx >> 6] >> (idx & 63)) & 1u;
}

bool RewardBuffer::row_initialized(long tau) const {
    const long row = tau - rollout_start_;
    return row >= 0 && row < rows_init_;
}

void RewardBuffer::set_own_row(long t, const std::vector<std::uint8_t>& indicator) {
    const long row = t - rollout_start_;
    if (row < 0 || row >= t0_) throw UsageError("observation time outside the current rollout");
    if (row != rows_init_)
        throw UsageError(row < rows_init_ ? "row already initialized"
                                          : "rows must be initialized in order");
    if (static_cast<int>(indicator.size()) != m_)
        throw UsageError("indicator length does not match task count");
    for (int m = 0; m < m_; ++m)
        if (indicator[m]) {
            const std::size_t idx = static_cast<std::size_t>(row) * m_ + m;
            words_[idx >> 6] |= (1ull << (idx & 63));
        }
    ++rows_init_;
}

std::vector<double> RewardBuffer::column_sums() const {
    std::vector<double> sums(m_, 0.0);
    for (long row = 0; row < rows_init_; ++row)
        for (int m = 0; m < m_; ++m) {
            const std::size_t idx = static_cast<std::size_t>(row) * m_ + m;
            sums[m] += (words_[idx >> 6] >> (idx & 63)) & 1u;
        }
    return sums;
}

void observe_local(RewardBuffer& buffer, long t, Vec2 own_position, const FloorPlan& plan) {
    buffer.set_own_row(t, zone_indicator(own_position, plan));
}

namespace {

// Masks off bits in rows >= row_limit so an exchange at time t never touches
// the fresh row tau = t (neighbors see it from t+1 on).
void mask_rows_from(std::vector<std::uint64_t>& words, int row_limit, int m) {
    const std::size_t first = static_cast<std::size_t>(row_limit) * m;
    for (std::size_t w = first >> 6; w < words.size(); ++w) {
        if ((w << 6) >= first)
            words[w] = 0;
        else
            words[w] &= (1ull << (first & 63)) - 1;
    }
}

}  // namespace

void exchange(std::vector<RewardBuffer>& buffers, const GraphSample& sample) {
    if (buffers.empty()) return;
    const long start = buffers[0].rollout_start();
    const int t0 = buffers[0].t0();
    const int m = buffers[0].n_tasks();
    for (const RewardBuffer& b : buffers)
        if (b.rollout_start() != start || b.t0() != t0 || b.n_tasks() != m)
            throw UsageError("gossip exchange across mismatched rollouts");
    const long t = sample.time;
    if (t <= start) return;  // no rows tau < t exist yet in this rollout
    const int row_limit = static_cast<int>(std::min<long>(t - start, t0));

    // Synchronous semantics: snapshot all buffers, then OR into each agent.
    std::vector<std::vector<std::uint64_t>> snapshot;
    snapshot.reserve(buffers.size());
    for (const RewardBuffer& b : buffers) {
        snapshot.push_back(b.words());
        mask_rows_from(snapshot.back(), row_limit, m);
    }
    const int n = static_cast<int>(buffers.size());
    for (int agent = 0; agent < n; ++agent) {
        auto& words = buffers[agent].words();
        for (auto [a, b] : sample.active_edges) {
            const int other = (a == agent) ? b : (b == agent) ? a : -1;
            if (other < 0) continue;
            const auto& src = snapshot[other];
            for (std::size_t w = 0; w < words.size(); ++w) words[w] |= src[w];
        }
    }
}

std::vector<double> finalize(const RewardBuffer& buffer) {
    if (buffer.rows_initialized() != buffer.t0())
        throw UsageError("finalize before the rollout is complete");
    return buffer.column_sums();
}

GossipSession::GossipSession(int n_agents, int t0, int m)
    : n_agents_(n_agents), t0_(t0), m_(m) {
    if (n_agents <= 0) throw UsageError("gossip session needs at least one agent");
    start_rollout(0);
}

void GossipSession::start_rollout(long rollout_start) {
    rollout_start_ = rollout_start;
    buffers_.clear();
    for (int n = 0; n < n_agents_; ++n) buffers_.emplace_back(n, rollout_start, t0_, m_);
    const std::size_t n_words = buffers_[0].words().size();
    shared_.assign(n_agents_, std::vector<std::vector<std::uint64_t>>(
                                  n_agents_, std::vector<std::uint64_t>(n_words, 0)));
}

void GossipSession::observe(int agent, long t, const std::vector<std::uint8_t>& indicator) {
    buffers_[agent].set_own_row(t, indicator);
}

void GossipSession::exchange(const GraphSample& sample) {
    const long t = sample.time;
    if (t <= rollout_start_) return;
    const int row_limit = static_cast<int>(std::min<long>(t - rollout_start_, t0_));

    std::vector<std::vector<std::uint64_t>> snapshot;
    snapshot.reserve(buffers_.size());
    for (const RewardBuffer& b : buffers_) {
        snapshot.push_back(b.words());
        mask_rows_from(snapshot.back(), row_limit, m_);
    }
    for (auto [a, b] : sample.active_edges) {
        for (auto [sender, receiver] : {std::pair{a, b}, std::pair{b, a}}) {
            auto& already = shared_[sender][receiver];
            auto& reverse = shared_[receiver][sender];
            auto& words = buffers_[receiver].words();
            int payload = 0;
            for (std::size_t w = 0; w < words.size(); ++w) {
                const std::uint64_t fresh = snapshot[sender][w] & ~already[w];
                payload += std::popcount(fresh);
                words[w] |= fresh;
                already[w] = snapshot[sender][w];
                // The receiver never echoes these bits back over this edge.
                reverse[w] |= snapshot[sender][w];
            }
            total_payload_bits_ += payload;
            if (trace_) trace_(t, sender, receiver, payload);
        }
    }
}

std::vector<double> GossipSession::finalize(int agent) const {
    return patrol::finalize(buffers_[agent]);
}

}  // namespace patrol
