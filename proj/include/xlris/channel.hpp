#ifndef XLRIS_CHANNEL_HPP
#define XLRIS_CHANNEL_HPP

#include "xlris/errors.hpp"
#include "xlris/geometry.hpp"
#include "xlris/random.hpp"
#include "xlris/region.hpp"

#include <cmath>
#include <span>

namespace xlris
{
    enum class ChannelModel
    {
        near_field,
        far_field
    };

    // Scatter boxes for the BS-side (G) and user-side (r) main-path scatters, plus link parameters.
    struct SceneConfig
    {
        ArrayDims dims;
        Box g_box;             // BS -> RIS scatter region [wavelengths]
        Box r_box;             // RIS -> user scatter region [wavelengths]
        cdouble s_bar{1.0, 0.0}; // Effective transmitted symbol
        double sigma2 = 1.0;   // Noise power

        void validate() const
        {
            dims.validate();
            g_box.validate("scene.g_box");
            r_box.validate("scene.r_box");
            if (!(g_box.y.lo > 0.0) || !(r_box.y.lo > 0.0))
                throw InputError("scene: scatter boxes must lie in front of the surface (y_min > 0)");
            if (!(sigma2 >= 0.0))
                throw InputError("scene: noise power must be nonnegative");
        }
    };

    // One cascaded channel draw: h_bar = alpha * steering(geometry).
    struct ChannelRealization
    {
        ChannelModel model = ChannelModel::near_field;
        ArrayDims dims;
        cdouble alpha{1.0, 0.0};
        Point3 p_g, p_r;           // near-field geometry
        double phi_sum = 0.0;      // far-field geometry (summed spatial angles)
        double psi_sum = 0.0;
        ComplexVector h_bar;

        // Unit-modulus steering part of h_bar, regenerated from the stored geometry.
        ComplexVector steering() const
        {
            return model == ChannelModel::near_field ? cascaded_steering(p_g, p_r, dims)
                                                     : far_field_steering(phi_sum, psi_sum, dims);
        }

        std::size_t size() const noexcept { return h_bar.size(); }
    };

    inline ChannelRealization make_near_field_channel(const Point3 &p_g, const Point3 &p_r, cdouble alpha, const ArrayDims &dims)
    {
        ChannelRealization ch;
        ch.model = ChannelModel::near_field;
        ch.dims = dims;
        ch.alpha = alpha;
        ch.p_g = p_g;
        ch.p_r = p_r;
        ch.h_bar = cascaded_steering(p_g, p_r, dims);
        for (auto &v : ch.h_bar)
            v *= alpha;
        return ch;
    }

    // Far-field cascaded channel from the per-hop angles; only their sums matter.
    inline ChannelRealization make_far_field_channel(double phi_g, double psi_g, double phi_r, double psi_r, cdouble alpha,
                                                     const ArrayDims &dims)
    {
        ChannelRealization ch;
        ch.model = ChannelModel::far_field;
        ch.dims = dims;
        ch.alpha = alpha;
        ch.phi_sum = phi_g + phi_r;
        ch.psi_sum = psi_g + psi_r;
        ch.h_bar = far_field_steering(ch.phi_sum, ch.psi_sum, dims);
        for (auto &v : ch.h_bar)
            v *= alpha;
        return ch;
    }

    inline Point3 sample_point(const Box &box, RandomStream &rng)
    {
        const double x = rng.uniform(box.x.lo, box.x.hi);
        const double y = rng.uniform(box.y.lo, box.y.hi);
        const double z = rng.uniform(box.z.lo, box.z.hi);
        return {x, y, z};
    }

    // Uniform scatters in their boxes, alpha = alpha_G * alpha_r with both CN(0, 1).
    inline ChannelRealization sample_near_field_channel(const SceneConfig &scene, RandomStream &rng)
    {
        scene.validate();
        const Point3 p_g = sample_point(scene.g_box, rng);
        const Point3 p_r = sample_point(scene.r_box, rng);
        const cdouble alpha_g = rng.complex_normal(1.0);
        const cdouble alpha_r = rng.complex_normal(1.0);
        return make_near_field_channel(p_g, p_r, alpha_g * alpha_r, scene.dims);
    }

    // Noiseless projection theta^T h_bar (no conjugation: theta already carries the conjugate phases).
    inline cdouble project(std::span<const cdouble> theta, std::span<const cdouble> h_bar)
    {
        if (theta.size() != h_bar.size())
            throw InputError("project: reflecting vector length does not match channel length");
        cdouble acc{0.0, 0.0};
        for (std::size_t i = 0; i < theta.size(); ++i)
            acc += theta[i] * h_bar[i];
        return acc;
    }

    // One training slot: theta^T h_bar s_bar + n, n ~ CN(0, sigma2). No draw is taken when sigma2 == 0.
    inline cdouble received_signal(std::span<const cdouble> theta, const ChannelRealization &ch, cdouble s_bar, double sigma2,
                                   RandomStream &rng)
    {
        if (!(sigma2 >= 0.0))
            throw InputError("received_signal: noise power must be nonnegative");
        cdouble r = project(theta, ch.h_bar) * s_bar;
        if (sigma2 > 0.0)
            r += rng.complex_normal(sigma2);
        return r;
    }
}

#endif
