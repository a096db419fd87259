#ifndef XLRIS_GEOMETRY_HPP
#define XLRIS_GEOMETRY_HPP

#include "xlris/errors.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

// Planar RIS geometry. The surface lies in the x-z plane centred on the origin.
// All lengths (element spacing, coordinates, distances) are in carrier wavelengths,
// except rayleigh_distance() which works in meters.
//
// Element vectors use n1-major order: index = (n1 - 1) * N2 + (n2 - 1).

namespace xlris
{
    using cdouble = std::complex<double>;
    using ComplexVector = std::vector<cdouble>;

    struct ArrayDims
    {
        std::size_t n1 = 1; // Elements along x
        std::size_t n2 = 1; // Elements along z
        double d = 0.5;     // Element spacing [wavelengths]

        std::size_t size() const noexcept { return n1 * n2; }

        void validate() const
        {
            if (n1 < 1 || n2 < 1)
                throw InputError("ArrayDims: n1 and n2 must be at least 1");
            if (!(d > 0.0) || !std::isfinite(d))
                throw InputError("ArrayDims: element spacing must be positive and finite");
        }

        friend bool operator==(const ArrayDims &, const ArrayDims &) = default;
    };

    struct Point3
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;

        bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

        friend bool operator==(const Point3 &, const Point3 &) = default;
    };

    // exp(-j 2 pi D), evaluated on D reduced modulo 1 so that large distances keep their phase precision.
    inline cdouble unit_phasor(double distance)
    {
        const double frac = distance - std::floor(distance);
        const double arg = -2.0 * std::numbers::pi * frac;
        return {std::cos(arg), std::sin(arg)};
    }

    // Position of element (n1_idx, n2_idx), 1-based.
    inline Point3 element_position(std::size_t n1_idx, std::size_t n2_idx, const ArrayDims &dims)
    {
        dims.validate();
        if (n1_idx < 1 || n1_idx > dims.n1 || n2_idx < 1 || n2_idx > dims.n2)
            throw InputError("element_position: element index out of range");
        const double cx = (double(n1_idx) - (double(dims.n1) + 1.0) / 2.0) * dims.d;
        const double cz = (double(n2_idx) - (double(dims.n2) + 1.0) / 2.0) * dims.d;
        return {cx, 0.0, cz};
    }

    inline double point_to_element_distance(const Point3 &p, std::size_t n1_idx, std::size_t n2_idx, const ArrayDims &dims)
    {
        const Point3 e = element_position(n1_idx, n2_idx, dims);
        const double dx = p.x - e.x, dz = p.z - e.z;
        return std::sqrt(dx * dx + p.y * p.y + dz * dz);
    }

    // Distances from p to every element, in vector order.
    inline std::vector<double> distance_profile(const Point3 &p, const ArrayDims &dims)
    {
        dims.validate();
        if (!p.finite())
            throw InputError("distance_profile: point is not finite");
        std::vector<double> out(dims.size());
        const double y2 = p.y * p.y;
        const double c1 = (double(dims.n1) + 1.0) / 2.0, c2 = (double(dims.n2) + 1.0) / 2.0;
        std::size_t i = 0;
        for (std::size_t a = 1; a <= dims.n1; ++a)
        {
            const double dx = p.x - (double(a) - c1) * dims.d;
            for (std::size_t b = 1; b <= dims.n2; ++b)
            {
                const double dz = p.z - (double(b) - c2) * dims.d;
                out[i++] = std::sqrt(dx * dx + y2 + dz * dz);
            }
        }
        return out;
    }

    // Planar-wave steering vector: entry (i, j) = exp(-j 2 pi (phi i + psi j)), i, j zero-based.
    inline ComplexVector far_field_steering(double phi, double psi, const ArrayDims &dims)
    {
        dims.validate();
        ComplexVector out(dims.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < dims.n1; ++i)
            for (std::size_t j = 0; j < dims.n2; ++j)
                out[k++] = unit_phasor(phi * double(i) + psi * double(j));
        return out;
    }

    // Spherical-wave steering vector of a single scatter point.
    inline ComplexVector near_field_steering(const Point3 &p, const ArrayDims &dims)
    {
        const auto dist = distance_profile(p, dims);
        ComplexVector out(dist.size());
        for (std::size_t i = 0; i < dist.size(); ++i)
            out[i] = unit_phasor(dist[i]);
        return out;
    }

    // Effective distance profile of a scatter pair: D^G(n1,n2) + D^r(n1,n2).
    inline std::vector<double> cascaded_distance_profile(const Point3 &p_g, const Point3 &p_r, const ArrayDims &dims)
    {
        auto out = distance_profile(p_g, dims);
        const auto dr = distance_profile(p_r, dims);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += dr[i];
        return out;
    }

    // Cascaded steering vector of the BS-side and user-side scatter pair.
    inline ComplexVector cascaded_steering(const Point3 &p_g, const Point3 &p_r, const ArrayDims &dims)
    {
        const auto dist = cascaded_distance_profile(p_g, p_r, dims);
        ComplexVector out(dist.size());
        for (std::size_t i = 0; i < dist.size(); ++i)
            out[i] = unit_phasor(dist[i]);
        return out;
    }

    // Far-/near-field boundary 2 D^2 / lambda. Both arguments and the result in meters.
    inline double rayleigh_distance(double aperture_m, double wavelength_m)
    {
        if (!(aperture_m > 0.0) || !(wavelength_m > 0.0))
            throw InputError("rayleigh_distance: aperture and wavelength must be positive");
        return 2.0 * aperture_m * aperture_m / wavelength_m;
    }
}

#endif
