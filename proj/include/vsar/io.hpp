#pragma once

// Binary containers for echoes (.sechb) and images (.sgrid), and an 8-bit PGM export.
// Everything on disk is little-endian; payloads are 32-bit floats.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "echo_sim.hpp"
#include "geometry.hpp"
#include "pfa.hpp"

namespace vsar {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        buf_.insert(buf_.end(), c, c + n);
    }
    template <class T>
    void le(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
        bytes(b, sizeof(T));
    }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) { le(v); }
    void u64(std::uint64_t v) { le(v); }
    void f32(float v) { le(v); }
    void f64(double v) { le(v); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + path + " for writing");
        f.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
        if (!f) throw IoError("write failed: " + path);
    }
    const std::vector<unsigned char>& data() const { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot open " + path);
        buf_.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    }
    void bytes(void* p, std::size_t n) {
        if (pos_ + n > buf_.size()) throw IoError(path_ + ": truncated file");
        std::memcpy(p, buf_.data() + pos_, n);
        pos_ += n;
    }
    template <class T>
    T le() {
        unsigned char b[sizeof(T)];
        bytes(b, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
        T v;
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
    std::uint8_t u8() { return le<std::uint8_t>(); }
    std::uint32_t u32() { return le<std::uint32_t>(); }
    std::uint64_t u64() { return le<std::uint64_t>(); }
    float f32() { return le<float>(); }
    double f64() { return le<double>(); }
    std::string str() {
        const std::uint32_t n = u32();
        if (n > (1u << 20)) throw IoError(path_ + ": implausible string length");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    void expect_magic(const char* magic) {
        char m[5];
        bytes(m, 5);
        if (std::memcmp(m, magic, 5) != 0) throw IoError(path_ + ": bad magic, expected " + magic);
    }
    std::size_t remaining() const { return buf_.size() - pos_; }

private:
    std::string path_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// FNV-1a over the little-endian bytes of every pulse time and position.
inline std::uint64_t trajectory_digest(const Trajectory& tr) {
    detail::Writer w;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        w.f64(tr.t[i]);
        w.f64(tr.pos[i].x);
        w.f64(tr.pos[i].y);
        w.f64(tr.pos[i].z);
    }
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : w.data()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct EchoFile {
    EchoMatrix echo;
    std::uint64_t trajectory_digest = 0;
};

inline void write_echo(const std::string& path, const EchoMatrix& e, std::uint64_t digest) {
    detail::Writer w;
    w.bytes("SECH1", 5);
    w.u64(e.pulses());
    w.u64(e.samples());
    for (const Axis* a : {&e.fast, &e.slow}) {
        w.f64(a->start);
        w.f64(a->step);
        w.u64(a->count);
        w.str(a->unit);
    }
    w.str(to_string(e.domain));
    w.u8(e.rvp_removed ? 1 : 0);
    w.u64(e.seed);
    w.u64(digest);
    for (const cplx& v : e.data.vec()) {
        w.f32(static_cast<float>(v.real()));
        w.f32(static_cast<float>(v.imag()));
    }
    w.save(path);
}

inline EchoFile read_echo(const std::string& path) {
    detail::Reader r(path);
    r.expect_magic("SECH1");
    EchoFile f;
    const std::uint64_t na = r.u64(), nr = r.u64();
    for (Axis* a : {&f.echo.fast, &f.echo.slow}) {
        a->start = r.f64();
        a->step = r.f64();
        a->count = r.u64();
        a->unit = r.str();
    }
    f.echo.domain = domain_from_string(r.str());
    f.echo.rvp_removed = r.u8() != 0;
    f.echo.seed = r.u64();
    f.trajectory_digest = r.u64();
    if (na * nr * 8 != r.remaining()) throw IoError(path + ": payload size does not match the header dims");
    f.echo.data = CArray(na, nr);
    for (auto& v : f.echo.data.vec()) {
        const float re = r.f32(), im = r.f32();
        v = cplx(re, im);
    }
    return f;
}

struct ImageFile {
    ComplexImage image;
    bool complex = true;
};

inline void write_image(const std::string& path, const ComplexImage& img, bool complex = true) {
    detail::Writer w;
    w.bytes("SGRD1", 5);
    w.u64(img.nx());
    w.u64(img.ny());
    w.f64(img.x0);
    w.f64(img.y0);
    w.f64(img.dx);
    w.f64(img.dy);
    w.f64(img.kcx);
    w.f64(img.kcy);
    w.u8(img.coords == CoordSys::GOCS ? 0 : 1);
    w.u8(complex ? 1 : 0);
    for (const cplx& v : img.pix.vec()) {
        if (complex) {
            w.f32(static_cast<float>(v.real()));
            w.f32(static_cast<float>(v.imag()));
        } else {
            w.f32(static_cast<float>(std::abs(v)));
        }
    }
    w.save(path);
}

inline ImageFile read_image(const std::string& path) {
    detail::Reader r(path);
    r.expect_magic("SGRD1");
    ImageFile f;
    const std::uint64_t nx = r.u64(), ny = r.u64();
    f.image.x0 = r.f64();
    f.image.y0 = r.f64();
    f.image.dx = r.f64();
    f.image.dy = r.f64();
    f.image.kcx = r.f64();
    f.image.kcy = r.f64();
    f.image.coords = r.u8() == 0 ? CoordSys::GOCS : CoordSys::LOS;
    f.complex = r.u8() != 0;
    if (nx * ny * (f.complex ? 8 : 4) != r.remaining()) throw IoError(path + ": payload size does not match the header dims");
    f.image.pix = CArray(ny, nx);
    for (auto& v : f.image.pix.vec()) {
        const float re = r.f32();
        const float im = f.complex ? r.f32() : 0.0f;
        v = cplx(re, im);
    }
    return f;
}

// 8-bit magnitude image in dB, floor_db below the peak mapped to black. Row 0 is the top (largest y).
inline void write_pgm(const std::string& path, const ComplexImage& img, double floor_db = 40.0) {
    if (!(floor_db > 0)) throw ParameterError("pgm: dynamic range must be positive");
    double mx = 0;
    for (const cplx& v : img.pix.vec()) mx = std::max(mx, std::abs(v));
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << "P5\n" << img.nx() << " " << img.ny() << "\n255\n";
    std::vector<unsigned char> row(img.nx());
    for (std::size_t r = img.ny(); r-- > 0;) {
        for (std::size_t c = 0; c < img.nx(); ++c) {
            const double a = std::abs(img.pix(r, c));
            const double db = (mx > 0 && a > 0) ? 20 * std::log10(a / mx) : -1e9;
            row[c] = static_cast<unsigned char>(std::lround(255.0 * std::clamp(1.0 + db / floor_db, 0.0, 1.0)));
        }
        f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!f) throw IoError("write failed: " + path);
}

// Binary (P5) or ASCII (P2) grey map as a reflectivity map scaled to [0, 1]; row 0 is the top.
inline ReflectivityMap read_pgm_map(const std::string& path, double spacing) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::string magic;
    f >> magic;
    if (magic != "P5" && magic != "P2") throw IoError(path + ": not a PGM file");
    auto next_int = [&]() {
        std::string tok;
        while (f >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(f, rest);
                continue;
            }
            return std::stol(tok);
        }
        throw IoError(path + ": truncated PGM header");
    };
    const long w = next_int(), h = next_int(), maxv = next_int();
    if (w <= 0 || h <= 0 || maxv <= 0 || maxv > 65535) throw IoError(path + ": bad PGM header");
    ReflectivityMap m;
    m.values = RArray(static_cast<std::size_t>(h), static_cast<std::size_t>(w));
    m.spacing = spacing;
    m.x0 = -0.5 * static_cast<double>(w - 1) * spacing;
    m.y0 = -0.5 * static_cast<double>(h - 1) * spacing;
    if (magic == "P5") {
        f.get();
        const int bpp = maxv > 255 ? 2 : 1;
        std::vector<unsigned char> buf(static_cast<std::size_t>(w * h * bpp));
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!f) throw IoError(path + ": truncated PGM payload");
        for (long r = 0; r < h; ++r)
            for (long c = 0; c < w; ++c) {
                const std::size_t i = static_cast<std::size_t>((r * w + c) * bpp);
                const double v = bpp == 2 ? buf[i] * 256.0 + buf[i + 1] : buf[i];
                m.values(static_cast<std::size_t>(h - 1 - r), static_cast<std::size_t>(c)) = v / static_cast<double>(maxv);
            }
    } else {
        for (long r = 0; r < h; ++r)
            for (long c = 0; c < w; ++c)
                m.values(static_cast<std::size_t>(h - 1 - r), static_cast<std::size_t>(c)) =
                    static_cast<double>(next_int()) / static_cast<double>(maxv);
    }
    return m;
}

}  // namespace vsar
