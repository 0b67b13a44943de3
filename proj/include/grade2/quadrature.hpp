#pragma once

#include <array>
#include <cmath>

namespace grade2::quad {

/// Point on the reference triangle in barycentric coordinates, weight relative to the area.
struct TrianglePoint {
    std::array<double, 3> bary;
    double weight;
};

/// Seven-point rule, exact for polynomials of total degree 5.
inline constexpr int triangle_degree = 5;

inline const std::array<TrianglePoint, 7>& triangle_rule() {
    static const std::array<TrianglePoint, 7> rule = [] {
        const double s15 = std::sqrt(15.0);
        const double a1 = (6.0 - s15) / 21.0;
        const double b1 = (9.0 + 2.0 * s15) / 21.0;
        const double a2 = (6.0 + s15) / 21.0;
        const double b2 = (9.0 - 2.0 * s15) / 21.0;
        const double w0 = 9.0 / 40.0;
        const double w1 = (155.0 - s15) / 1200.0;
        const double w2 = (155.0 + s15) / 1200.0;
        return std::array<TrianglePoint, 7>{{
            {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, w0},
            {{b1, a1, a1}, w1},
            {{a1, b1, a1}, w1},
            {{a1, a1, b1}, w1},
            {{b2, a2, a2}, w2},
            {{a2, b2, a2}, w2},
            {{a2, a2, b2}, w2},
        }};
    }();
    return rule;
}

/// Point on [0,1] with weight relative to the segment length.
struct EdgePoint {
    double t;
    double weight;
};

/// Three-point Gauss-Legendre, exact for degree 5.
inline constexpr int edge_degree = 5;

inline const std::array<EdgePoint, 3>& edge_rule() {
    static const std::array<EdgePoint, 3> rule = [] {
        const double d = 0.5 * std::sqrt(3.0 / 5.0);
        return std::array<EdgePoint, 3>{{{0.5 - d, 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + d, 5.0 / 18.0}}};
    }();
    return rule;
}

} // namespace grade2::quad
