#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace trackgen {

struct Vec2i {
    int x = 0;
    int y = 0;

    friend bool operator==(const Vec2i&, const Vec2i&) = default;
    Vec2i operator+(const Vec2i& o) const { return {x + o.x, y + o.y}; }
    Vec2i operator-(const Vec2i& o) const { return {x - o.x, y - o.y}; }
};

// Compass heading on the grid. +x is East, +y is North.
enum class Heading : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

constexpr std::array<Heading, 4> all_headings = {Heading::North, Heading::East,
                                                 Heading::South, Heading::West};

constexpr Vec2i heading_delta(Heading h) {
    switch (h) {
    case Heading::North: return {0, 1};
    case Heading::East: return {1, 0};
    case Heading::South: return {0, -1};
    case Heading::West: return {-1, 0};
    }
    return {0, 0};
}

constexpr Heading rotate_right(Heading h) {
    return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}

constexpr Heading rotate_left(Heading h) {
    return static_cast<Heading>((static_cast<int>(h) + 3) % 4);
}

constexpr bool perpendicular(Heading a, Heading b) {
    return (static_cast<int>(a) + static_cast<int>(b)) % 2 == 1;
}

// Math angle in radians (East = 0, North = pi/2).
double heading_angle(Heading h);

std::string heading_name(Heading h);
Heading heading_from_name(const std::string& name);

} // namespace trackgen
