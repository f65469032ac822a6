#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "trackgen/geometry.hpp"

namespace trackgen {

enum class TileKind : std::uint8_t {
    StartFinish = 0,
    Straight = 1,
    CurveLeft = 2,
    CurveRight = 3,
    Loop = 4,
    Ramp = 5,
};

// Number of grid cells the piece occupies, laid out collinearly along the
// entry heading.
constexpr int footprint(TileKind k) {
    return (k == TileKind::Loop || k == TileKind::Ramp) ? 3 : 1;
}

constexpr Heading exit_heading_of(TileKind k, Heading entry) {
    if (k == TileKind::CurveLeft) return rotate_left(entry);
    if (k == TileKind::CurveRight) return rotate_right(entry);
    return entry;
}

// Simple tiles are the only ones the circuit closer may place.
constexpr bool is_simple(TileKind k) {
    return k == TileKind::StartFinish || k == TileKind::Straight ||
           k == TileKind::CurveLeft || k == TileKind::CurveRight;
}

constexpr bool is_event(TileKind k) {
    return k == TileKind::Loop || k == TileKind::Ramp;
}

std::string tile_name(TileKind k);
TileKind tile_from_name(const std::string& name);

// All kinds a genome may contain (everything except StartFinish).
const std::vector<TileKind>& genome_alphabet();

// Fixed-length tile-ID sequence. StartFinish is implicit at the origin and
// never appears in a genome.
class Genome {
public:
    Genome() = default;
    explicit Genome(std::vector<TileKind> genes) : genes_(std::move(genes)) {
        for (TileKind k : genes_) {
            if (k == TileKind::StartFinish)
                throw std::invalid_argument("genome may not contain StartFinish");
        }
    }

    std::size_t size() const { return genes_.size(); }
    bool empty() const { return genes_.empty(); }
    TileKind operator[](std::size_t i) const { return genes_[i]; }
    const std::vector<TileKind>& genes() const { return genes_; }

    auto begin() const { return genes_.begin(); }
    auto end() const { return genes_.end(); }

    friend bool operator==(const Genome&, const Genome&) = default;

    // Compact key for uniqueness sets and memo tables.
    std::string key() const {
        std::string s;
        s.reserve(genes_.size());
        for (TileKind k : genes_) s.push_back(static_cast<char>('0' + static_cast<int>(k)));
        return s;
    }

private:
    std::vector<TileKind> genes_;
};

} // namespace trackgen
