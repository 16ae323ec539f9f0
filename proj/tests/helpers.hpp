#ifndef RADCLASS_TESTS_HELPERS_HPP
#define RADCLASS_TESTS_HELPERS_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "radclass/rng.hpp"
#include "radclass/types.hpp"

namespace testutil {

inline radclass::IQRecording rec_from(std::vector<radclass::cdouble> samples, double fs = 1.0) {
    radclass::IQRecording rec;
    rec.samples = std::move(samples);
    rec.sample_rate = fs;
    return rec;
}

inline radclass::IQRecording constant_rec(std::size_t n, radclass::cdouble value) {
    return rec_from(std::vector<radclass::cdouble>(n, value));
}

inline radclass::IQRecording gaussian_rec(std::size_t n, std::uint64_t seed) {
    radclass::Rng rng(seed);
    std::vector<radclass::cdouble> s(n);
    for (auto& v : s) v = radclass::cdouble(rng.gaussian(), rng.gaussian());
    return rec_from(std::move(s));
}

/// complex exponential at `cycles` rotations per sample
inline radclass::IQRecording tone_rec(std::size_t n, double cycles, double fs = 1.0) {
    std::vector<radclass::cdouble> s(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double ang = 2.0 * M_PI * cycles * static_cast<double>(t);
        s[t] = radclass::cdouble(std::cos(ang), std::sin(ang));
    }
    return rec_from(std::move(s), fs);
}

/// |z| follows 1 + depth*sin(2 pi fm t)
inline radclass::IQRecording am_tone_rec(std::size_t n, double depth, double fm) {
    std::vector<radclass::cdouble> s(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double a = 1.0 + depth * std::sin(2.0 * M_PI * fm * static_cast<double>(t));
        s[t] = radclass::cdouble(a, 0.0);
    }
    return rec_from(std::move(s));
}

}  // namespace testutil

#endif
