#pragma once

#include <array>
#include <cmath>

namespace defectgeo {

/// A point of the spatial manifold in Eulerian coordinates, plus time.
struct Point {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double t = 0.0;

    /// Coordinate by axis: 0 = x, 1 = y, 2 = z, 3 = t.
    double operator[](int axis) const noexcept
    {
        switch (axis) {
        case 0: return x;
        case 1: return y;
        case 2: return z;
        default: return t;
        }
    }

    Point shifted(int axis, double delta) const noexcept
    {
        Point p = *this;
        switch (axis) {
        case 0: p.x += delta; break;
        case 1: p.y += delta; break;
        case 2: p.z += delta; break;
        default: p.t += delta; break;
        }
        return p;
    }

    std::array<double, 4> coords() const noexcept { return {x, y, z, t}; }

    bool finite() const noexcept
    {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(t);
    }
};

}  // namespace defectgeo
