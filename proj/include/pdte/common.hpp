#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdte {

using Bytes = std::vector<uint8_t>;

// Per-party values. Protocol code runs both logical parties cooperatively in
// one process; anything indexed by Pair<> is party-local state and must only
// be combined in tests/oracles.
template <typename T>
using Pair = std::array<T, 2>;

enum class Party : uint8_t { P0 = 0, P1 = 1 };

inline constexpr size_t idx(Party p) { return static_cast<size_t>(p); }
inline constexpr Party other(Party p) { return p == Party::P0 ? Party::P1 : Party::P0; }

enum class Phase : uint8_t { Offline = 0, Online = 1 };

inline const char* to_string(Party p) { return p == Party::P0 ? "P0" : "P1"; }
inline const char* to_string(Phase f) { return f == Phase::Offline ? "offline" : "online"; }

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WidthMismatch : ProtocolError { using ProtocolError::ProtocolError; };
struct ModulusMismatch : ProtocolError { using ProtocolError::ProtocolError; };
struct ChannelClosed : ProtocolError { using ProtocolError::ProtocolError; };
struct CorrelationExhausted : ProtocolError { using ProtocolError::ProtocolError; };
// Beaver-triple pools are correlations too; alias kept for call sites that
// speak in triples.
using TriplesExhausted = CorrelationExhausted;

struct ConfigInvalid : std::runtime_error { using std::runtime_error::runtime_error; };

struct ParseError : std::runtime_error {
    ParseError(size_t line, const std::string& reason)
        : std::runtime_error("parse error at line " + std::to_string(line) + ": " + reason),
          line_no(line) {}
    size_t line_no;
};
struct TopologyError : std::runtime_error { using std::runtime_error::runtime_error; };

struct IndexOutOfRange : std::runtime_error { using std::runtime_error::runtime_error; };
struct IndexWidthOverflow : std::runtime_error { using std::runtime_error::runtime_error; };
struct MaskOverflow : std::runtime_error { using std::runtime_error::runtime_error; };
struct PlaintextOutOfRange : std::runtime_error { using std::runtime_error::runtime_error; };
struct KeyMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct BmtInvalid : std::runtime_error { using std::runtime_error::runtime_error; };
struct InvalidTree : std::runtime_error { using std::runtime_error::runtime_error; };
struct LayoutMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct TreeNotComplete : std::runtime_error { using std::runtime_error::runtime_error; };
struct UnsupportedQ : std::runtime_error { using std::runtime_error::runtime_error; };

// Bits needed to index [0, m), i.e. sigma = ceil(log2(m)). sigma(1) = 0.
inline uint32_t index_bits(uint64_t m) {
    uint32_t b = 0;
    while ((uint64_t(1) << b) < m) ++b;
    return b;
}

inline size_t bytes_for_bits(size_t bits) { return (bits + 7) / 8; }

}  // namespace pdte
