#pragma once

#include <deque>
#include <fstream>
#include <sstream>

#include "pdte/common.hpp"

namespace pdte {

struct NetworkModel {
    double rtt_ms;          // round-trip latency
    double bandwidth_bps;   // bits per second

    NetworkModel(double rtt, double bw) : rtt_ms(rtt), bandwidth_bps(bw) {
        if (rtt_ms < 0) throw ConfigInvalid("NetworkModel: rtt < 0");
        if (bandwidth_bps <= 0) throw ConfigInvalid("NetworkModel: bandwidth <= 0");
    }

    // The three settings of the experimental section.
    static NetworkModel lan() { return {0.1, 1e9}; }
    static NetworkModel man() { return {6.0, 100e6}; }
    static NetworkModel wan() { return {80.0, 40e6}; }
};

// Per-run accounting: bytes per (party, phase), rounds per phase, plus the raw
// flush log. A round is a flush event in which at least one message crossed
// the channel in either direction. Dealer-provisioned correlation bytes are
// tracked in a separate cell so one-time setup traffic and preprocessing
// material never blur together.
class Transcript {
public:
    void add_bytes(Party p, Phase f, uint64_t n) {
        bytes_[idx(p)][size_t(f)] += n;
        pending_[idx(p)] += n;
    }

    void record_flush(Phase f, bool traffic) {
        if (traffic) {
            rounds_[size_t(f)] += 1;
            flushes_.push_back({f, {pending_[0], pending_[1]}});
        }
        pending_[0] = pending_[1] = 0;
    }

    void add_correlation_bytes(Party p, uint64_t n) { corr_bytes_[idx(p)] += n; }

    uint64_t bytes(Party p, Phase f) const { return bytes_[idx(p)][size_t(f)]; }
    uint64_t bytes(Phase f) const { return bytes_[0][size_t(f)] + bytes_[1][size_t(f)]; }
    uint64_t total_bytes() const { return bytes(Phase::Offline) + bytes(Phase::Online); }
    uint64_t rounds(Phase f) const { return rounds_[size_t(f)]; }
    uint64_t total_rounds() const { return rounds_[0] + rounds_[1]; }
    uint64_t correlation_bytes(Party p) const { return corr_bytes_[idx(p)]; }
    uint64_t correlation_bytes() const { return corr_bytes_[0] + corr_bytes_[1]; }

    struct FlushEvent {
        Phase phase;
        uint64_t bytes[2];  // per sending party, framing included
    };
    const std::vector<FlushEvent>& flushes() const { return flushes_; }

    // CSV export: party,phase,bytes,rounds. Correlation-file bytes appear as
    // phase "corr" rows with zero rounds.
    std::string to_csv() const {
        std::ostringstream os;
        os << "party,phase,bytes,rounds\n";
        for (Party p : {Party::P0, Party::P1}) {
            for (Phase f : {Phase::Offline, Phase::Online})
                os << to_string(p) << ',' << to_string(f) << ',' << bytes(p, f) << ','
                   << rounds(f) << '\n';
            os << to_string(p) << ",corr," << correlation_bytes(p) << ",0\n";
        }
        return os.str();
    }

    void write_csv(const std::string& path) const {
        std::ofstream f(path);
        if (!f) throw ConfigInvalid("cannot open csv output: " + path);
        f << to_csv();
    }

private:
    uint64_t bytes_[2][2] = {{0, 0}, {0, 0}};
    uint64_t rounds_[2] = {0, 0};
    uint64_t corr_bytes_[2] = {0, 0};
    uint64_t pending_[2] = {0, 0};
    std::vector<FlushEvent> flushes_;
};

// rounds * rtt + bits / bandwidth, in milliseconds.
inline double modeled_time_ms(uint64_t rounds, uint64_t bytes, const NetworkModel& nm) {
    return double(rounds) * nm.rtt_ms + double(bytes) * 8.0 / nm.bandwidth_bps * 1000.0;
}

inline double modeled_time_ms(const Transcript& t, const NetworkModel& nm) {
    return modeled_time_ms(t.total_rounds(), t.total_bytes(), nm);
}

inline double modeled_time_ms(const Transcript& t, Phase f, const NetworkModel& nm) {
    return modeled_time_ms(t.rounds(f), t.bytes(f), nm);
}

class Endpoint;

// In-process duplex transport. send() queues; flush_round() delivers all
// queued messages in both directions and advances the round counter iff any
// traffic crossed. recv() before delivery is a protocol bug and throws --
// this is what forces flush calls to sit at genuine dependency barriers.
class Channel {
public:
    static constexpr uint64_t kFramingBytes = 4;  // length prefix, counted

    Channel() = default;

    void send(Party from, Bytes msg) {
        if (closed_[idx(other(from))])
            throw ChannelClosed("send: peer endpoint terminated");
        if (closed_[idx(from)])
            throw ChannelClosed("send: endpoint terminated");
        transcript_.add_bytes(from, phase_[idx(from)], msg.size() + kFramingBytes);
        pending_[idx(from)].push_back(std::move(msg));
    }

    Bytes recv(Party to) {
        auto& q = ready_[idx(other(to))];
        if (q.empty())
            throw ProtocolError("recv: no delivered message (missing flush_round?)");
        Bytes msg = std::move(q.front());
        q.pop_front();
        return msg;
    }

    void flush_round() {
        bool traffic = !pending_[0].empty() || !pending_[1].empty();
        for (int s = 0; s < 2; ++s) {
            while (!pending_[s].empty()) {
                ready_[s].push_back(std::move(pending_[s].front()));
                pending_[s].pop_front();
            }
        }
        transcript_.record_flush(phase_[0], traffic);
    }

    void set_phase(Phase f) { phase_[0] = phase_[1] = f; }
    void set_phase(Party p, Phase f) { phase_[idx(p)] = f; }
    Phase phase(Party p) const { return phase_[idx(p)]; }

    void close(Party p) { closed_[idx(p)] = true; }
    bool closed(Party p) const { return closed_[idx(p)]; }

    bool idle() const {
        return pending_[0].empty() && pending_[1].empty() && ready_[0].empty() &&
               ready_[1].empty();
    }

    Transcript& transcript() { return transcript_; }
    const Transcript& transcript() const { return transcript_; }

    Endpoint endpoint(Party p);

private:
    std::deque<Bytes> pending_[2];  // indexed by sender
    std::deque<Bytes> ready_[2];
    bool closed_[2] = {false, false};
    Phase phase_[2] = {Phase::Offline, Phase::Offline};
    Transcript transcript_;
};

// One party's handle onto the shared channel. Endpoints are not shared
// between parties; each is driven by exactly one party's logic.
class Endpoint {
public:
    Endpoint(Channel& ch, Party p) : ch_(&ch), party_(p) {}

    void send(Bytes msg) { ch_->send(party_, std::move(msg)); }
    Bytes recv() { return ch_->recv(party_); }
    void flush_round() { ch_->flush_round(); }
    void set_phase(Phase f) { ch_->set_phase(party_, f); }
    Phase phase() const { return ch_->phase(party_); }
    Party party() const { return party_; }
    void close() { ch_->close(party_); }
    Transcript& transcript() { return ch_->transcript(); }

private:
    Channel* ch_;
    Party party_;
};

inline Endpoint Channel::endpoint(Party p) { return Endpoint(*this, p); }

}  // namespace pdte
