#pragma once

#include <cmath>
#include <vector>

namespace vgr {

// Linear-light RGB. Nominal range [0,1]; overshoot is permitted everywhere
// except at 8-bit image output, where values are clamped.
struct ColorRGB {
    double r = 0.0, g = 0.0, b = 0.0;

    ColorRGB() = default;
    ColorRGB(double r_, double g_, double b_) : r(r_), g(g_), b(b_) {}

    ColorRGB operator+(ColorRGB o) const { return {r + o.r, g + o.g, b + o.b}; }
    ColorRGB operator-(ColorRGB o) const { return {r - o.r, g - o.g, b - o.b}; }
    ColorRGB operator*(double s) const { return {r * s, g * s, b * s}; }
    ColorRGB operator-() const { return {-r, -g, -b}; }
    ColorRGB& operator+=(ColorRGB o) { r += o.r; g += o.g; b += o.b; return *this; }
    bool operator==(const ColorRGB&) const = default;

    double operator[](int i) const { return i == 0 ? r : (i == 1 ? g : b); }
    double& operator[](int i) { return i == 0 ? r : (i == 1 ? g : b); }

    double max_abs() const { return std::max({std::abs(r), std::abs(g), std::abs(b)}); }
};

inline ColorRGB operator*(double s, ColorRGB c) { return c * s; }

struct ColorStop {
    double t = 0.0;
    ColorRGB color;
    bool operator==(const ColorStop&) const = default;
};

// Piecewise-linear color over [0,1] with end clamping. At least one stop;
// stop parameters strictly increasing.
struct ColorRamp {
    std::vector<ColorStop> stops;

    static ColorRamp constant(ColorRGB c) { return {{{0.0, c}}}; }

    ColorRGB eval(double t) const {
        if (stops.size() == 1 || t <= stops.front().t) return stops.front().color;
        if (t >= stops.back().t) return stops.back().color;
        size_t i = 1;
        while (stops[i].t < t) ++i;
        double span = stops[i].t - stops[i - 1].t;
        double w = span > 0 ? (t - stops[i - 1].t) / span : 0.0;
        return stops[i - 1].color * (1 - w) + stops[i].color * w;
    }

    bool operator==(const ColorRamp&) const = default;
};

}  // namespace vgr
