#include "vforms/box.hpp"

#include <stdexcept>

namespace vforms {

Box make_box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box corner arities differ");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw std::invalid_argument("box needs lo < hi on every axis");
    return Box{std::move(lo), std::move(hi)};
}

std::optional<Box> intersect(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("box dimensions differ");
    Box out;
    for (int i = 0; i < a.dim(); ++i) {
        const double lo = std::max(a.lo[i], b.lo[i]);
        const double hi = std::min(a.hi[i], b.hi[i]);
        if (!(lo < hi)) return std::nullopt;
        out.lo.push_back(lo);
        out.hi.push_back(hi);
    }
    return out;
}

Box inflate(const Box& b, double factor) {
    Box out = b;
    for (int i = 0; i < b.dim(); ++i) {
        const double mid = 0.5 * (b.lo[i] + b.hi[i]);
        const double half = 0.5 * (b.hi[i] - b.lo[i]) * (1.0 + factor);
        out.lo[i] = mid - half;
        out.hi[i] = mid + half;
    }
    return out;
}

}  // namespace vforms
