#pragma once

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "common.hpp"

namespace vsar {

enum class Dir { Forward = FFTW_FORWARD, Inverse = FFTW_BACKWARD };

namespace detail {

// fftw planning is not thread safe; execution with new arrays is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int n, Dir d) {
        std::lock_guard<std::mutex> lk(mu_);
        auto key = std::make_pair(n, static_cast<int>(d));
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> a(n);
        // in-place plan: executed later on other in-place buffers
        fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                       reinterpret_cast<fftw_complex*>(a.data()),
                                       static_cast<int>(d), FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw NumericError("fftw planning failed");
        plans_.emplace(key, p);
        return p;
    }

    ~PlanCache() {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }

private:
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace detail

// Unnormalized in-place DFT of length n.
inline void fft_inplace(cplx* x, std::size_t n, Dir d) {
    if (n <= 1) return;
    fftw_plan p = detail::PlanCache::instance().get(static_cast<int>(n), d);
    auto* f = reinterpret_cast<fftw_complex*>(x);
    fftw_execute_dft(p, f, f);
}

inline void fft_inplace(std::vector<cplx>& x, Dir d) { fft_inplace(x.data(), x.size(), d); }

// Swap halves so index n/2 moves to 0 (ifftshift) or back (fftshift).
inline void fftshift(cplx* x, std::size_t n) {
    std::rotate(x, x + (n - n / 2), x + n);
}
inline void ifftshift(cplx* x, std::size_t n) {
    std::rotate(x, x + n / 2, x + n);
}

// Orthonormal DFT between centered axes (sample n/2 is the origin on both sides).
inline void cfft(cplx* x, std::size_t n, Dir d) {
    ifftshift(x, n);
    fft_inplace(x, n, d);
    fftshift(x, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}
inline void cfft(std::vector<cplx>& x, Dir d) { cfft(x.data(), x.size(), d); }

inline void cfft_rows(CArray& a, Dir d) {
    for (std::size_t r = 0; r < a.rows(); ++r) cfft(a.row(r), a.cols(), d);
}

inline void cfft_cols(CArray& a, Dir d) {
    std::vector<cplx> buf(a.rows());
    for (std::size_t c = 0; c < a.cols(); ++c) {
        for (std::size_t r = 0; r < a.rows(); ++r) buf[r] = a(r, c);
        cfft(buf, d);
        for (std::size_t r = 0; r < a.rows(); ++r) a(r, c) = buf[r];
    }
}

inline void cfft2(CArray& a, Dir d) {
    cfft_rows(a, d);
    cfft_cols(a, d);
}

// Smallest 2^a 3^b 5^c >= n.
inline std::size_t good_fft_size(std::size_t n) {
    if (n <= 1) return 1;
    for (std::size_t m = n;; ++m) {
        std::size_t k = m;
        for (std::size_t p : {2u, 3u, 5u})
            while (k % p == 0) k /= p;
        if (k == 1) return m;
    }
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

}  // namespace vsar
