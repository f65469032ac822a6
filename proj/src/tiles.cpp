#include "trackgen/tiles.hpp"

#include <cmath>

#include "trackgen/errors.hpp"

namespace trackgen {

double heading_angle(Heading h) {
    switch (h) {
    case Heading::North: return M_PI / 2.0;
    case Heading::East: return 0.0;
    case Heading::South: return -M_PI / 2.0;
    case Heading::West: return M_PI;
    }
    return 0.0;
}

std::string heading_name(Heading h) {
    switch (h) {
    case Heading::North: return "North";
    case Heading::East: return "East";
    case Heading::South: return "South";
    case Heading::West: return "West";
    }
    return "?";
}

Heading heading_from_name(const std::string& name) {
    for (Heading h : all_headings)
        if (heading_name(h) == name) return h;
    throw ConfigError("unknown heading: '" + name + "'");
}

std::string tile_name(TileKind k) {
    switch (k) {
    case TileKind::StartFinish: return "StartFinish";
    case TileKind::Straight: return "Straight";
    case TileKind::CurveLeft: return "CurveLeft";
    case TileKind::CurveRight: return "CurveRight";
    case TileKind::Loop: return "Loop";
    case TileKind::Ramp: return "Ramp";
    }
    return "?";
}

TileKind tile_from_name(const std::string& name) {
    for (TileKind k : {TileKind::StartFinish, TileKind::Straight, TileKind::CurveLeft,
                       TileKind::CurveRight, TileKind::Loop, TileKind::Ramp})
        if (tile_name(k) == name) return k;
    throw ConfigError("unknown tile kind: '" + name + "'");
}

const std::vector<TileKind>& genome_alphabet() {
    static const std::vector<TileKind> kinds = {TileKind::Straight, TileKind::CurveLeft,
                                                TileKind::CurveRight, TileKind::Loop,
                                                TileKind::Ramp};
    return kinds;
}

} // namespace trackgen
