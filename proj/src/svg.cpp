#include "trackgen/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "trackgen/errors.hpp"
#include "trackgen/util.hpp"

namespace trackgen {

namespace {

constexpr int kCell = 28;
constexpr int kMargin = 2; // cells of padding around the track extent

const char* kBlue = "#8db4f2";
const char* kRed = "#f2938d";
const char* kNeutral = "#ffffff";

const char* tint_for(double mean_arousal) {
    if (mean_arousal < 0.33) return kBlue;
    if (mean_arousal > 0.66) return kRed;
    return kNeutral;
}

struct PieceTint {
    bool has_windows = false;
    double mean = 0.5;
};

} // namespace

std::string render_track_svg(const Track& track, std::span<const double> arousal) {
    if (!track.feasible || !track.closed)
        throw EvaluationError("InfeasibleTrack: cannot render an unfinished track");

    // Traversal sequence: StartFinish first, then the placed pieces.
    std::vector<const PlacedPiece*> seq;
    seq.push_back(&track.start);
    for (const PlacedPiece& p : track.pieces) seq.push_back(&p);

    // Map trace windows onto pieces by single-pass traversal share, each
    // piece weighted by its cell count.
    std::vector<double> cum(seq.size() + 1, 0.0);
    for (std::size_t i = 0; i < seq.size(); ++i)
        cum[i + 1] = cum[i] + static_cast<double>(seq[i]->cells.size());
    const double total = cum.back();

    std::vector<PieceTint> tints(seq.size());
    std::vector<double> sums(seq.size(), 0.0);
    std::vector<int> counts(seq.size(), 0);
    const std::size_t m = arousal.size();
    for (std::size_t w = 0; w < m; ++w) {
        const double t = (static_cast<double>(w) + 0.5) / static_cast<double>(m);
        const double pos = t * total;
        std::size_t piece = 0;
        while (piece + 1 < seq.size() && cum[piece + 1] <= pos) ++piece;
        sums[piece] += arousal[w];
        counts[piece] += 1;
    }
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (counts[i] > 0) {
            tints[i].has_windows = true;
            tints[i].mean = sums[i] / counts[i];
        }
    }

    int min_x = track.config.width, min_y = track.config.height, max_x = 0, max_y = 0;
    for (const PlacedPiece* p : seq) {
        for (Vec2i c : p->cells) {
            min_x = std::min(min_x, c.x);
            min_y = std::min(min_y, c.y);
            max_x = std::max(max_x, c.x);
            max_y = std::max(max_y, c.y);
        }
    }
    min_x -= kMargin;
    min_y -= kMargin;
    max_x += kMargin;
    max_y += kMargin;

    const int cols = max_x - min_x + 1;
    const int rows = max_y - min_y + 1;
    const int width = cols * kCell;
    const int height = rows * kCell + 70; // extra band for the legend

    // Grid y grows north; SVG y grows down.
    auto sx = [&](double x) { return (x - min_x) * kCell; };
    auto sy = [&](double y) { return (max_y + 1 - y) * kCell; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"#f7f7f4\"/>\n";

    for (std::size_t i = 0; i < seq.size(); ++i) {
        const PlacedPiece& p = *seq[i];
        const char* fill = tints[i].has_windows ? tint_for(tints[i].mean) : kNeutral;
        for (std::size_t ci = 0; ci < p.cells.size(); ++ci) {
            const Vec2i c = p.cells[ci];
            const bool elevated = static_cast<int>(ci) == p.elevated_index;
            svg << "<rect data-piece=\"" << i << "\" x=\"" << sx(c.x) << "\" y=\""
                << sy(c.y + 1) << "\" width=\"" << kCell << "\" height=\"" << kCell
                << "\" fill=\"" << fill << "\" stroke=\"#555\" stroke-width=\"1\"";
            if (elevated) svg << " stroke-dasharray=\"4,3\"";
            svg << "/>\n";
        }
        // Piece glyphs: center line for straights, arc for curves, circle for
        // loops, chevrons for the ramp.
        const Vec2i c0 = p.cells.front();
        const double cx = sx(c0.x + 0.5);
        const double cy = sy(c0.y + 0.5);
        switch (p.kind) {
        case TileKind::StartFinish:
            svg << "<text x=\"" << cx << "\" y=\"" << cy + 5
                << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
                   "font-weight=\"bold\">S</text>\n";
            break;
        case TileKind::Loop: {
            const Vec2i mid = p.cells[1];
            svg << "<circle cx=\"" << sx(mid.x + 0.5) << "\" cy=\"" << sy(mid.y + 0.5)
                << "\" r=\"" << kCell * 0.32 << "\" fill=\"none\" stroke=\"#333\" "
                   "stroke-width=\"2\"/>\n";
            break;
        }
        case TileKind::Ramp: {
            const Vec2i mid = p.cells[1];
            svg << "<text x=\"" << sx(mid.x + 0.5) << "\" y=\"" << sy(mid.y + 0.5) + 4
                << "\" text-anchor=\"middle\" font-size=\"11\" "
                   "font-family=\"sans-serif\">=</text>\n";
            break;
        }
        case TileKind::CurveLeft:
        case TileKind::CurveRight: {
            svg << "<circle cx=\"" << cx << "\" cy=\"" << cy
                << "\" r=\"3\" fill=\"#333\"/>\n";
            break;
        }
        default: break;
        }
    }

    // Start direction arrow.
    {
        const Vec2i c = track.start.cells.front();
        const Vec2i d = heading_delta(track.start.exit_heading);
        const double x1 = sx(c.x + 0.5);
        const double y1 = sy(c.y + 0.5);
        const double x2 = sx(c.x + 0.5 + 0.45 * d.x);
        const double y2 = sy(c.y + 0.5 + 0.45 * d.y);
        svg << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\""
            << y2 << "\" stroke=\"#222\" stroke-width=\"2\"/>\n";
    }

    // Legend.
    const int ly = rows * kCell + 18;
    const struct {
        const char* color;
        const char* label;
    } legend[3] = {{kRed, "arousal increase"},
                   {kNeutral, "neutral"},
                   {kBlue, "arousal decrease"}};
    for (int i = 0; i < 3; ++i) {
        const int lx = 10 + i * 150;
        svg << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"16\" height=\"16\" "
            << "fill=\"" << legend[i].color << "\" stroke=\"#555\"/>\n";
        svg << "<text x=\"" << lx + 22 << "\" y=\"" << ly + 13
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << legend[i].label
            << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

} // namespace trackgen
