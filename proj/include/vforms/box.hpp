#pragma once

#include <optional>
#include <span>
#include <vector>

namespace vforms {

/// Axis-aligned box, lo[i] < hi[i] per axis.
struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const {
        double v = 1.0;
        for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
        return v;
    }
    bool contains(std::span<const double> p, double inset = 0.0) const {
        if (static_cast<int>(p.size()) != dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (p[i] < lo[i] + inset || p[i] > hi[i] - inset) return false;
        return true;
    }
};

Box make_box(std::vector<double> lo, std::vector<double> hi);
std::optional<Box> intersect(const Box& a, const Box& b);
Box inflate(const Box& b, double factor);  // grow each half-width by `factor`

}  // namespace vforms
