#ifndef XLRIS_REGION_HPP
#define XLRIS_REGION_HPP

#include "xlris/errors.hpp"
#include "xlris/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xlris
{
    // Closed interval [lo, hi].
    struct Interval
    {
        double lo = 0.0;
        double hi = 0.0;

        double width() const noexcept { return hi - lo; }
        bool contains(double v) const noexcept { return v >= lo && v <= hi; }
        bool valid() const noexcept { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; }

        friend bool operator==(const Interval &, const Interval &) = default;
    };

    // Axis-aligned box of scatter positions.
    struct Box
    {
        Interval x, y, z;

        bool contains(const Point3 &p) const noexcept { return x.contains(p.x) && y.contains(p.y) && z.contains(p.z); }

        void validate(const std::string &what) const
        {
            if (!x.valid() || !y.valid() || !z.valid())
                throw InputError(what + ": range minimum exceeds maximum (or is not finite)");
        }

        friend bool operator==(const Box &, const Box &) = default;
    };

    // Intersection of two intervals; empty results collapse to the nearest end of `bounds`.
    inline Interval clip(const Interval &iv, const Interval &bounds)
    {
        Interval out{std::max(iv.lo, bounds.lo), std::min(iv.hi, bounds.hi)};
        if (out.lo > out.hi)
            out.hi = out.lo = std::clamp(iv.lo, bounds.lo, bounds.hi);
        return out;
    }

    inline Box clip(const Box &b, const Box &bounds)
    {
        return {clip(b.x, bounds.x), clip(b.y, bounds.y), clip(b.z, bounds.z)};
    }
}

#endif
