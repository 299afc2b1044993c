#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluct {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class Domain { Torus, Line };

// Uniform 1-d grid. Torus grids cover [0, 2pi) with periodic wrap; line
// grids cover [-halfWidth, halfWidth] inclusive.
struct Grid {
    Domain domain = Domain::Torus;
    std::vector<double> x;
    double spacing = 0.0;

    std::size_t size() const { return x.size(); }

    // Quadrature weight of node i: rectangle rule on the torus,
    // trapezoid on the line.
    double weight(std::size_t i) const {
        if (domain == Domain::Line && (i == 0 || i + 1 == x.size()))
            return 0.5 * spacing;
        return spacing;
    }
};

Grid make_torus_grid(std::size_t n);
Grid make_line_grid(std::size_t n, double halfWidth);

// Wrap a coordinate into [0, 2pi).
inline double wrap_torus(double v) {
    v = std::fmod(v, kTwoPi);
    return v < 0.0 ? v + kTwoPi : v;
}

// Signed difference a-b wrapped into (-pi, pi].
inline double torus_difference(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d <= -0.5 * kTwoPi) d += kTwoPi;
    if (d > 0.5 * kTwoPi) d -= kTwoPi;
    return d;
}

} // namespace fluct
