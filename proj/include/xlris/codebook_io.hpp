#ifndef XLRIS_CODEBOOK_IO_HPP
#define XLRIS_CODEBOOK_IO_HPP

#include "xlris/codebook.hpp"
#include "xlris/errors.hpp"

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <tuple>
#include <vector>

// Codebook cache file, little-endian:
//
//   "XLRC"  u32 version  u32 N1  u32 N2  f64 d  u64 L
//   L x { f64 gx gy gz rx ry rz, u64 key_hash }
//   u32 CRC-32 of every preceding byte
//
// Only the point pairs are stored; codeword vectors are regenerated on load.

namespace xlris
{
    inline constexpr std::uint32_t codebook_format_version = 1;

    namespace detail
    {
        inline void put_u32(std::vector<unsigned char> &b, std::uint32_t v)
        {
            for (int i = 0; i < 4; ++i)
                b.push_back(static_cast<unsigned char>(v >> (8 * i)));
        }
        inline void put_u64(std::vector<unsigned char> &b, std::uint64_t v)
        {
            for (int i = 0; i < 8; ++i)
                b.push_back(static_cast<unsigned char>(v >> (8 * i)));
        }
        inline void put_f64(std::vector<unsigned char> &b, double v) { put_u64(b, std::bit_cast<std::uint64_t>(v)); }

        class Reader
        {
        public:
            explicit Reader(const std::vector<unsigned char> &b) : b_(b) {}
            std::uint64_t u(int bytes)
            {
                if (pos_ + std::size_t(bytes) > b_.size())
                    throw LoadError("codebook file truncated");
                std::uint64_t v = 0;
                for (int i = 0; i < bytes; ++i)
                    v |= std::uint64_t(b_[pos_ + i]) << (8 * i);
                pos_ += std::size_t(bytes);
                return v;
            }
            std::uint32_t u32() { return static_cast<std::uint32_t>(u(4)); }
            std::uint64_t u64() { return u(8); }
            double f64() { return std::bit_cast<double>(u(8)); }
            std::size_t pos() const noexcept { return pos_; }

        private:
            const std::vector<unsigned char> &b_;
            std::size_t pos_ = 0;
        };

        inline std::uint32_t crc32_of(const unsigned char *data, std::size_t len)
        {
            uLong crc = ::crc32(0L, Z_NULL, 0);
            while (len > 0)
            {
                const auto chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
                crc = ::crc32(crc, data, chunk);
                data += chunk;
                len -= chunk;
            }
            return static_cast<std::uint32_t>(crc);
        }
    }

    inline std::vector<unsigned char> serialize_codebook(const NearFieldCodebook &cb)
    {
        std::vector<unsigned char> b;
        b.reserve(32 + cb.size() * 56 + 4);
        for (char c : {'X', 'L', 'R', 'C'})
            b.push_back(static_cast<unsigned char>(c));
        detail::put_u32(b, codebook_format_version);
        detail::put_u32(b, static_cast<std::uint32_t>(cb.dims().n1));
        detail::put_u32(b, static_cast<std::uint32_t>(cb.dims().n2));
        detail::put_f64(b, cb.dims().d);
        detail::put_u64(b, cb.size());
        for (std::size_t l = 0; l < cb.size(); ++l)
        {
            const auto [pg, pr] = cb.source_pair(l);
            for (double v : {pg.x, pg.y, pg.z, pr.x, pr.y, pr.z})
                detail::put_f64(b, v);
            detail::put_u64(b, cb.entries()[l].key);
        }
        detail::put_u32(b, detail::crc32_of(b.data(), b.size()));
        return b;
    }

    // Rebuilds a codebook from serialized bytes; `dims` must match the header.
    inline NearFieldCodebook deserialize_codebook(const std::vector<unsigned char> &b, const ArrayDims &dims)
    {
        if (b.size() < 36 || std::memcmp(b.data(), "XLRC", 4) != 0)
            throw LoadError("not a codebook file (bad magic)");
        const std::uint32_t stored_crc = static_cast<std::uint32_t>(b[b.size() - 4]) | (std::uint32_t(b[b.size() - 3]) << 8) |
                                         (std::uint32_t(b[b.size() - 2]) << 16) | (std::uint32_t(b[b.size() - 1]) << 24);
        if (detail::crc32_of(b.data(), b.size() - 4) != stored_crc)
            throw LoadError("codebook file checksum mismatch");

        detail::Reader in(b);
        in.u32(); // magic
        if (const auto v = in.u32(); v != codebook_format_version)
            throw LoadError("unsupported codebook format version " + std::to_string(v));
        ArrayDims stored;
        stored.n1 = in.u32();
        stored.n2 = in.u32();
        stored.d = in.f64();
        if (!(stored == dims))
            throw LoadError("codebook file was built for different array dimensions");
        const std::uint64_t count = in.u64();
        if (count > (b.size() - in.pos()) / 56 || in.pos() + count * 56 + 4 != b.size())
            throw LoadError("codebook file length does not match its record count");

        std::vector<Point3> gs, rs;
        std::map<std::tuple<double, double, double>, std::uint32_t> g_index, r_index;
        auto intern = [](std::vector<Point3> &pts, auto &index, const Point3 &p) {
            auto [it, inserted] = index.try_emplace(std::make_tuple(p.x, p.y, p.z), std::uint32_t(pts.size()));
            if (inserted)
                pts.push_back(p);
            return it->second;
        };
        std::vector<NearFieldCodebook::Entry> entries;
        entries.reserve(count);
        for (std::uint64_t l = 0; l < count; ++l)
        {
            Point3 pg{in.f64(), in.f64(), in.f64()};
            Point3 pr{in.f64(), in.f64(), in.f64()};
            const std::uint64_t h = in.u64();
            if (!pg.finite() || !pr.finite())
                throw LoadError("codebook file contains a non-finite point");
            if (key_hash(canonical_key(cascaded_distance_profile(pg, pr, dims))) != h)
                throw LoadError("codebook record " + std::to_string(l) + " does not match its key");
            entries.push_back({intern(gs, g_index, pg), intern(rs, r_index, pr), h});
        }
        return NearFieldCodebook(dims, std::move(gs), std::move(rs), std::move(entries));
    }

    inline void save_codebook(const NearFieldCodebook &cb, const std::filesystem::path &path)
    {
        const auto bytes = serialize_codebook(cb);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        out.write(reinterpret_cast<const char *>(bytes.data()), std::streamsize(bytes.size()));
        if (!out)
            throw std::runtime_error("failed writing " + path.string());
    }

    inline NearFieldCodebook load_codebook(const std::filesystem::path &path, const ArrayDims &dims)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw LoadError("cannot open " + path.string());
        std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return deserialize_codebook(bytes, dims);
    }
}

#endif
