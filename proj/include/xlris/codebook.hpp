#ifndef XLRIS_CODEBOOK_HPP
#define XLRIS_CODEBOOK_HPP

#include "xlris/errors.hpp"
#include "xlris/geometry.hpp"
#include "xlris/region.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace xlris
{
    // ------------------------------------------------------------------------
    // Sample grids
    // ------------------------------------------------------------------------

    // Box of candidate scatter positions swept with a fixed step per axis.
    struct SampleGrid
    {
        Box range;
        double dx = 1.0, dy = 1.0, dz = 1.0;

        void validate() const
        {
            range.validate("SampleGrid");
            if (!(dx > 0.0) || !(dy > 0.0) || !(dz > 0.0) || !std::isfinite(dx) || !std::isfinite(dy) || !std::isfinite(dz))
                throw InputError("SampleGrid: sampling steps must be positive");
        }

        friend bool operator==(const SampleGrid &, const SampleGrid &) = default;
    };

    // lo, lo + step, ... up to the largest value not exceeding hi.
    inline std::vector<double> axis_samples(const Interval &iv, double step)
    {
        if (!iv.valid() || !(step > 0.0))
            throw InputError("axis_samples: invalid interval or step");
        // 1e-9 slack absorbs rounding in spans that are exact multiples of the step.
        const auto count = static_cast<std::size_t>(std::floor(iv.width() / step + 1e-9)) + 1;
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i)
            out[i] = iv.lo + double(i) * step;
        return out;
    }

    inline std::size_t grid_size(const SampleGrid &grid)
    {
        grid.validate();
        return axis_samples(grid.range.x, grid.dx).size() * axis_samples(grid.range.y, grid.dy).size() *
               axis_samples(grid.range.z, grid.dz).size();
    }

    // Cartesian product of the axis sweeps, x-major then y then z.
    inline std::vector<Point3> enumerate_grid(const SampleGrid &grid)
    {
        grid.validate();
        const auto xs = axis_samples(grid.range.x, grid.dx);
        const auto ys = axis_samples(grid.range.y, grid.dy);
        const auto zs = axis_samples(grid.range.z, grid.dz);
        std::vector<Point3> out;
        out.reserve(xs.size() * ys.size() * zs.size());
        for (double x : xs)
            for (double y : ys)
                for (double z : zs)
                    out.push_back({x, y, z});
        return out;
    }

    // ------------------------------------------------------------------------
    // Canonical keys
    // ------------------------------------------------------------------------

    // Phase profile relative to element 1, in units of 1e-9 cycles.
    using CanonicalKey = std::vector<std::uint32_t>;

    inline constexpr double key_resolution = 1e-9;

    // Two distance profiles that differ by a constant, or by integers per element, map to the same key.
    inline CanonicalKey canonical_key(std::span<const double> distance_profile)
    {
        CanonicalKey key(distance_profile.size());
        if (distance_profile.empty())
            return key;
        const double f0 = distance_profile[0] - std::floor(distance_profile[0]);
        constexpr double scale = 1.0 / key_resolution;
        constexpr auto wrap = static_cast<std::int64_t>(1.0 / key_resolution);
        for (std::size_t i = 0; i < distance_profile.size(); ++i)
        {
            const double fi = distance_profile[i] - std::floor(distance_profile[i]);
            double t = fi - f0;
            if (t < 0.0)
                t += 1.0;
            std::int64_t q = std::llround(t * scale);
            if (q >= wrap)
                q -= wrap;
            key[i] = static_cast<std::uint32_t>(q);
        }
        return key;
    }

    // The codeword vector does not enter the key; the overload mirrors the pairing used by callers.
    inline CanonicalKey canonical_key(std::span<const cdouble> /*vector*/, std::span<const double> distance_profile)
    {
        return canonical_key(distance_profile);
    }

    // 64-bit FNV-1a over the key words, finished with a splitmix round.
    inline std::uint64_t key_hash(std::span<const std::uint32_t> key) noexcept
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::uint32_t w : key)
        {
            for (int b = 0; b < 4; ++b)
            {
                h ^= (w >> (8 * b)) & 0xFFu;
                h *= 0x100000001b3ULL;
            }
        }
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 33;
        return h;
    }

    // ------------------------------------------------------------------------
    // Codebooks
    // ------------------------------------------------------------------------

    struct Codeword
    {
        ComplexVector vector;
        std::pair<Point3, Point3> source_pair; // (BS-side point, user-side point)
        std::uint64_t key = 0;                 // hash of the canonical key
    };

    // Anything training can search: a size and a batched noiseless projection theta_l^T h for every codeword.
    template <typename T>
    concept SearchableCodebook = requires(const T &cb, std::span<const cdouble> h) {
        { cb.size() } -> std::convertible_to<std::size_t>;
        { cb.project_all(h) } -> std::same_as<ComplexVector>;
        { cb.codeword_vector(std::size_t{}) } -> std::same_as<ComplexVector>;
    };

    // Conjugated planar-wave codebook on the direction-cosine lattice u_n = (2n - N1 - 1) / N1,
    // v_m = (2m - N2 - 1) / N2, n-major. The steering spatial frequency of a lattice point is d * u.
    class FarFieldCodebook
    {
    public:
        explicit FarFieldCodebook(const ArrayDims &dims) : dims_(dims) { dims_.validate(); }

        std::size_t size() const noexcept { return dims_.size(); }
        const ArrayDims &dims() const noexcept { return dims_; }

        // Lattice coordinates (u_n, v_m) of codeword l (zero-based).
        std::pair<double, double> lattice(std::size_t l) const
        {
            if (l >= size())
                throw InputError("FarFieldCodebook: codeword index out of range");
            const std::size_t n = l / dims_.n2 + 1, m = l % dims_.n2 + 1;
            return {(2.0 * double(n) - double(dims_.n1) - 1.0) / double(dims_.n1),
                    (2.0 * double(m) - double(dims_.n2) - 1.0) / double(dims_.n2)};
        }

        ComplexVector codeword_vector(std::size_t l) const
        {
            const auto [u, v] = lattice(l);
            auto w = far_field_steering(dims_.d * u, dims_.d * v, dims_);
            for (auto &c : w)
                c = std::conj(c);
            return w;
        }

        ComplexVector project_all(std::span<const cdouble> h) const
        {
            if (h.size() != size())
                throw InputError("FarFieldCodebook: channel length does not match array size");
            ComplexVector out(size());
            for (std::size_t l = 0; l < size(); ++l)
            {
                const auto w = codeword_vector(l);
                cdouble acc{};
                for (std::size_t i = 0; i < w.size(); ++i)
                    acc += w[i] * h[i];
                out[l] = acc;
            }
            return out;
        }

    private:
        ArrayDims dims_;
    };

    inline FarFieldCodebook far_field_codebook(const ArrayDims &dims) { return FarFieldCodebook(dims); }

    // Near-field codebook: codewords are stored as indices into the two sampled point lists and
    // regenerated on demand. Codeword entry i = exp(+j 2 pi D_s(i)), D_s = D^G + D^r.
    class NearFieldCodebook
    {
    public:
        struct Entry
        {
            std::uint32_t g = 0; // index into g_points()
            std::uint32_t r = 0; // index into r_points()
            std::uint64_t key = 0;
        };

        NearFieldCodebook() = default;

        NearFieldCodebook(ArrayDims dims, std::vector<Point3> g_points, std::vector<Point3> r_points, std::vector<Entry> entries)
            : dims_(dims), g_points_(std::move(g_points)), r_points_(std::move(r_points)), entries_(std::move(entries))
        {
            dims_.validate();
            for (const auto &e : entries_)
                if (e.g >= g_points_.size() || e.r >= r_points_.size())
                    throw InputError("NearFieldCodebook: entry refers to a missing point");
            g_phasors_ = phasor_table(g_points_);
            r_phasors_ = phasor_table(r_points_);
        }

        std::size_t size() const noexcept { return entries_.size(); }
        bool empty() const noexcept { return entries_.empty(); }
        const ArrayDims &dims() const noexcept { return dims_; }
        const std::vector<Point3> &g_points() const noexcept { return g_points_; }
        const std::vector<Point3> &r_points() const noexcept { return r_points_; }
        const std::vector<Entry> &entries() const noexcept { return entries_; }

        // Generating grids, when the codebook was built from grids.
        std::optional<std::pair<SampleGrid, SampleGrid>> grids;

        // Points sampled from the grids before dedup (|grid_g| * |grid_r|).
        std::size_t candidate_pairs() const noexcept { return g_points_.size() * r_points_.size(); }

        std::pair<Point3, Point3> source_pair(std::size_t l) const
        {
            const auto &e = at(l);
            return {g_points_[e.g], r_points_[e.r]};
        }

        std::vector<double> distance_profile(std::size_t l) const
        {
            const auto [pg, pr] = source_pair(l);
            return cascaded_distance_profile(pg, pr, dims_);
        }

        CanonicalKey key(std::size_t l) const { return canonical_key(distance_profile(l)); }

        ComplexVector codeword_vector(std::size_t l) const
        {
            const auto dist = distance_profile(l);
            ComplexVector w(dist.size());
            for (std::size_t i = 0; i < dist.size(); ++i)
                w[i] = std::conj(unit_phasor(dist[i]));
            return w;
        }

        Codeword codeword(std::size_t l) const { return {codeword_vector(l), source_pair(l), at(l).key}; }

        // theta_l^T h for every codeword, via per-point phasor tables (no trig per codeword).
        ComplexVector project_all(std::span<const cdouble> h) const
        {
            const std::size_t n = dims_.size();
            if (h.size() != n)
                throw InputError("NearFieldCodebook: channel length does not match array size");
            std::vector<cdouble> weighted(r_phasors_.size());
            for (std::size_t r = 0; r < r_points_.size(); ++r)
                for (std::size_t i = 0; i < n; ++i)
                    weighted[r * n + i] = r_phasors_[r * n + i] * h[i];
            ComplexVector out(entries_.size());
            for (std::size_t l = 0; l < entries_.size(); ++l)
            {
                const cdouble *g = &g_phasors_[entries_[l].g * n];
                const cdouble *v = &weighted[entries_[l].r * n];
                double re = 0.0, im = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    re += g[i].real() * v[i].real() - g[i].imag() * v[i].imag();
                    im += g[i].real() * v[i].imag() + g[i].imag() * v[i].real();
                }
                out[l] = {re, im};
            }
            return out;
        }

    private:
        const Entry &at(std::size_t l) const
        {
            if (l >= entries_.size())
                throw InputError("NearFieldCodebook: codeword index out of range");
            return entries_[l];
        }

        std::vector<cdouble> phasor_table(const std::vector<Point3> &pts) const
        {
            const std::size_t n = dims_.size();
            std::vector<cdouble> table(pts.size() * n);
            for (std::size_t p = 0; p < pts.size(); ++p)
            {
                const auto dist = xlris::distance_profile(pts[p], dims_);
                for (std::size_t i = 0; i < n; ++i)
                    table[p * n + i] = std::conj(unit_phasor(dist[i]));
            }
            return table;
        }

        ArrayDims dims_;
        std::vector<Point3> g_points_, r_points_;
        std::vector<Entry> entries_;
        std::vector<cdouble> g_phasors_, r_phasors_;
    };

    namespace detail
    {
        inline std::vector<double> profile_table(const std::vector<Point3> &pts, const ArrayDims &dims)
        {
            const std::size_t n = dims.size();
            std::vector<double> table(pts.size() * n);
            for (std::size_t p = 0; p < pts.size(); ++p)
            {
                const auto d = distance_profile(pts[p], dims);
                std::copy(d.begin(), d.end(), table.begin() + std::ptrdiff_t(p * n));
            }
            return table;
        }
    }

    // Dedup over an ordered point-pair product. g outer, r inner; a pair is kept only if its
    // canonical key has not been seen. Key hashes are computed per g row (optionally on
    // `threads` workers) and reduced sequentially in order, so the result is scheduling-independent.
    inline NearFieldCodebook build_near_field_codebook(std::vector<Point3> g_points, std::vector<Point3> r_points,
                                                       const ArrayDims &dims, unsigned threads = 1)
    {
        dims.validate();
        if (g_points.empty() || r_points.empty())
            throw InputError("build_near_field_codebook: empty sample collection");
        const std::size_t n = dims.size(), ng = g_points.size(), nr = r_points.size();
        const auto g_dist = detail::profile_table(g_points, dims);
        const auto r_dist = detail::profile_table(r_points, dims);

        auto pair_key = [&](std::size_t g, std::size_t r, std::vector<double> &buf) {
            for (std::size_t i = 0; i < n; ++i)
                buf[i] = g_dist[g * n + i] + r_dist[r * n + i];
            return canonical_key(buf);
        };

        std::vector<std::uint64_t> hashes(ng * nr);
        auto hash_rows = [&](std::size_t g_begin, std::size_t g_end) {
            std::vector<double> buf(n);
            for (std::size_t g = g_begin; g < g_end; ++g)
                for (std::size_t r = 0; r < nr; ++r)
                    hashes[g * nr + r] = key_hash(pair_key(g, r, buf));
        };
        threads = std::max(1u, std::min<unsigned>(threads, unsigned(ng)));
        if (threads == 1)
            hash_rows(0, ng);
        else
        {
            std::vector<std::thread> pool;
            const std::size_t chunk = (ng + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t)
            {
                const std::size_t b = std::min(ng, t * chunk), e = std::min(ng, b + chunk);
                if (b < e)
                    pool.emplace_back(hash_rows, b, e);
            }
            for (auto &th : pool)
                th.join();
        }

        std::vector<NearFieldCodebook::Entry> entries;
        std::unordered_multimap<std::uint64_t, std::uint32_t> seen;
        seen.reserve(std::min<std::size_t>(ng * nr, 1u << 24));
        std::vector<double> buf(n);
        for (std::size_t g = 0; g < ng; ++g)
            for (std::size_t r = 0; r < nr; ++r)
            {
                const std::uint64_t h = hashes[g * nr + r];
                bool duplicate = false;
                auto [first, last] = seen.equal_range(h);
                if (first != last)
                {
                    const auto key = pair_key(g, r, buf);
                    for (auto it = first; it != last && !duplicate; ++it)
                    {
                        const auto &e = entries[it->second];
                        duplicate = pair_key(e.g, e.r, buf) == key;
                    }
                }
                if (!duplicate)
                {
                    seen.emplace(h, std::uint32_t(entries.size()));
                    entries.push_back({std::uint32_t(g), std::uint32_t(r), h});
                }
            }
        return NearFieldCodebook(dims, std::move(g_points), std::move(r_points), std::move(entries));
    }

    inline NearFieldCodebook build_near_field_codebook(const SampleGrid &grid_g, const SampleGrid &grid_r, const ArrayDims &dims,
                                                       unsigned threads = 1)
    {
        auto cb = build_near_field_codebook(enumerate_grid(grid_g), enumerate_grid(grid_r), dims, threads);
        cb.grids = std::make_pair(grid_g, grid_r);
        return cb;
    }
}

#endif
