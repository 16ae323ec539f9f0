#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "radclass/errors.hpp"
#include "radclass/features.hpp"
#include "radclass/rng.hpp"
#include "radclass/signal_io.hpp"

using namespace radclass;
using radclass::features::FeatureConfig;

namespace {

oracle::cvec to_cvec(const IQRecording& rec) { return rec.samples; }

std::vector<double> amplitudes_of(const IQRecording& rec) {
    std::vector<double> a(rec.samples.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(rec.samples[i]);
    return a;
}

std::vector<std::uint8_t> bits_of(const std::string& s) {
    std::vector<std::uint8_t> b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) b[i] = s[i] == '1' ? 1 : 0;
    return b;
}

// entropy of the oracle singular spectrum, using the production cutoff rule
double entropy_from_sigma(const std::vector<double>& sigma, std::size_t rows, std::size_t cols) {
    const double cutoff = sigma.front() * static_cast<double>(std::max(rows, cols)) *
                          std::numeric_limits<double>::epsilon();
    double total = 0.0;
    for (double s : sigma)
        if (s > cutoff) total += s;
    double h = 0.0;
    for (double s : sigma) {
        if (s > cutoff) {
            const double p = s / total;
            h -= p * std::log(p);
        }
    }
    return std::clamp(h / std::log(static_cast<double>(rows)), 0.0, 1.0);
}

}  // namespace

TEST_CASE("temporal kurtosis") {
    SUBCASE("constant modulus is exactly 1") {
        CHECK(features::temporal_kurtosis(testutil::constant_rec(128, {0.6, 0.8})) == 1.0);
        CHECK(features::temporal_kurtosis(testutil::tone_rec(512, 16.0)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("alternating on-off is exactly 2") {
        std::vector<cdouble> s(128);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = (i % 2 == 0) ? cdouble(1.5, 0.0) : cdouble(0.0, 0.0);
        CHECK(features::temporal_kurtosis(testutil::rec_from(std::move(s))) ==
              doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("complex gaussian sits near 2") {
        // |z|^2 is exponential, so E[a^4]/E[a^2]^2 = 2
        CHECK(features::temporal_kurtosis(testutil::gaussian_rec(8192, 3)) ==
              doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("zero signal rejected") {
        CHECK_THROWS_AS(features::temporal_kurtosis(testutil::constant_rec(64, {0.0, 0.0})),
                        ZeroSignalError);
    }
}

TEST_CASE("singular spectrum entropy") {
    SUBCASE("constant amplitude has zero entropy") {
        CHECK(features::singular_spectrum_entropy(testutil::constant_rec(256, {1.0, 0.0}), 16) <= 1e-9);
        // a pure tone also has constant amplitude
        CHECK(features::singular_spectrum_entropy(testutil::tone_rec(256, 12.0), 16) <= 1e-9);
    }
    SUBCASE("noise is more complex than a clean AM envelope") {
        const double h_noise = features::singular_spectrum_entropy(testutil::gaussian_rec(512, 21), 32);
        const double h_am = features::singular_spectrum_entropy(testutil::am_tone_rec(512, 0.5, 0.01), 32);
        CHECK(h_am > 0.0);
        CHECK(h_am < 1.0);
        CHECK(h_noise > 0.0);
        CHECK(h_noise <= 1.0);
        CHECK(h_noise > h_am);
    }
    SUBCASE("matches an independent Jacobi-based computation") {
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            const auto rec = testutil::gaussian_rec(256, seed);
            const std::size_t embed = 16;
            const auto sigma = oracle::ssa_singular_values(to_cvec(rec), embed);
            const double expect = entropy_from_sigma(sigma, embed, rec.samples.size() - embed + 1);
            CHECK(features::singular_spectrum_entropy(rec, embed) ==
                  doctest::Approx(expect).epsilon(1e-7));
        }
    }
    SUBCASE("embed dimension bounds") {
        CHECK_THROWS_AS(features::singular_spectrum_entropy(testutil::gaussian_rec(64, 1), 1),
                        InvalidArgumentError);
        CHECK_THROWS_AS(features::singular_spectrum_entropy(testutil::gaussian_rec(64, 1), 33),
                        InvalidArgumentError);
    }
}

TEST_CASE("bispectral integration") {
    SUBCASE("all-zero signal integrates to zero") {
        CHECK(features::bispectral_integration(testutil::constant_rec(1024, {0.0, 0.0}), 128) == 0.0);
    }
    SUBCASE("matches the naive DFT estimator") {
        const auto noise = testutil::gaussian_rec(1024, 5);
        CHECK(features::bispectral_integration(noise, 128) ==
              doctest::Approx(oracle::naive_bispectral_integration(to_cvec(noise), 128)).epsilon(1e-9));
        const auto qpsk = signal_io::synthesize(signal_io::modulation_by_name("QPSK"), 1024, 15.0, 4);
        CHECK(features::bispectral_integration(qpsk.recording, 128) ==
              doctest::Approx(oracle::naive_bispectral_integration(to_cvec(qpsk.recording), 128))
                  .epsilon(1e-9));
        const auto am = testutil::am_tone_rec(1024, 0.8, 0.05);
        CHECK(features::bispectral_integration(am, 64) ==
              doctest::Approx(oracle::naive_bispectral_integration(to_cvec(am), 64)).epsilon(1e-9));
    }
    SUBCASE("phase-coupled tones integrate higher than gaussian noise") {
        // f3 = f1 + f2 with aligned phases: the triple product keeps a fixed
        // phase in every segment, so segment averaging accumulates instead of
        // cancelling as it does for noise
        std::vector<cdouble> s(2048);
        const double f1 = 12.0 / 128.0, f2 = 7.0 / 128.0;
        for (std::size_t t = 0; t < s.size(); ++t) {
            const double x = static_cast<double>(t);
            const double ph1 = 2.0 * M_PI * f1 * x;
            const double ph2 = 2.0 * M_PI * f2 * x;
            s[t] = std::polar(1.0, ph1) + std::polar(1.0, ph2) + std::polar(1.0, ph1 + ph2);
        }
        const auto coupled = signal_io::normalize_power(testutil::rec_from(std::move(s)));
        const auto noise = signal_io::normalize_power(testutil::gaussian_rec(2048, 17));
        CHECK(features::bispectral_integration(coupled, 128) >
              features::bispectral_integration(noise, 128));
    }
    SUBCASE("too few segments") {
        CHECK_THROWS_AS(features::bispectral_integration(testutil::gaussian_rec(256, 1), 128),
                        TooShortError);
        CHECK_THROWS_AS(features::bispectral_integration(testutil::gaussian_rec(256, 1), 100),
                        InvalidArgumentError);  // not a power of two
    }
}

TEST_CASE("bandwidth factor") {
    SUBCASE("single tone has near-zero relative spread") {
        CHECK(features::bandwidth_factor(testutil::tone_rec(1024, 102.0)) < 0.05);
    }
    SUBCASE("symmetric two-tone pair lands at spread/centroid = 0.5") {
        // |f| values 102/1024 and 306/1024 with equal power: centroid 204/1024,
        // rms spread 102/1024
        std::vector<cdouble> s(1024);
        for (std::size_t t = 0; t < s.size(); ++t) {
            const double x = static_cast<double>(t) / 1024.0;
            s[t] = std::polar(1.0, 2.0 * M_PI * 102.0 * x) + std::polar(1.0, 2.0 * M_PI * 306.0 * x);
        }
        CHECK(features::bandwidth_factor(testutil::rec_from(std::move(s))) ==
              doctest::Approx(0.5).epsilon(0.05));
    }
    SUBCASE("matches the naive DFT computation") {
        for (std::uint64_t seed : {2ull, 9ull}) {
            const auto rec = testutil::gaussian_rec(512, seed);
            CHECK(features::bandwidth_factor(rec) ==
                  doctest::Approx(oracle::naive_bandwidth_factor(to_cvec(rec), rec.sample_rate))
                      .epsilon(1e-9));
        }
    }
    SUBCASE("zero signal rejected") {
        CHECK_THROWS_AS(features::bandwidth_factor(testutil::constant_rec(64, {0.0, 0.0})),
                        ZeroSignalError);
    }
}

TEST_CASE("energy concentration") {
    SUBCASE("pure tone concentrates fully") {
        CHECK(features::energy_concentration(testutil::tone_rec(1024, 64.0)) > 0.99);
    }
    SUBCASE("time impulse has a flat spectrum") {
        std::vector<cdouble> s(1024, {0.0, 0.0});
        s[100] = {1.0, 0.0};
        const double expect = std::ceil(0.1 * 1024.0) / 1024.0;  // 103/1024
        CHECK(features::energy_concentration(testutil::rec_from(std::move(s))) ==
              doctest::Approx(expect).epsilon(1e-6));
    }
    SUBCASE("white noise sits between flat and concentrated") {
        const double v = features::energy_concentration(testutil::gaussian_rec(4096, 8));
        CHECK(v > 0.1);
        CHECK(v < 0.5);
    }
}

TEST_CASE("fluctuation index") {
    SUBCASE("constant modulus is zero") {
        CHECK(features::fluctuation_index(testutil::tone_rec(512, 16.0)) <= 1e-12);
    }
    SUBCASE("alternating on-off is exactly 1") {
        std::vector<cdouble> s(256);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = (i % 2 == 0) ? cdouble(0.7, 0.7) : cdouble(0.0, 0.0);
        CHECK(features::fluctuation_index(testutil::rec_from(std::move(s))) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("complex gaussian power is exponential, ratio 1") {
        CHECK(features::fluctuation_index(testutil::gaussian_rec(8192, 13)) ==
              doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("fractal dimension") {
    SUBCASE("constant amplitude is exactly 1") {
        CHECK(features::fractal_dimension(testutil::constant_rec(256, {2.0, 0.0}), 16) == 1.0);
    }
    SUBCASE("smooth ramp stays near 1") {
        std::vector<cdouble> s(1024);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = {1.0 + static_cast<double>(i) / 1024.0, 0.0};
        CHECK(features::fractal_dimension(testutil::rec_from(std::move(s)), 16) ==
              doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("iid noise amplitude fills the plane") {
        CHECK(features::fractal_dimension(testutil::gaussian_rec(4096, 77), 16) ==
              doctest::Approx(2.0).epsilon(0.075));
    }
    SUBCASE("matches the reference Higuchi computation") {
        // the production value is the reference slope clamped to [1, 2]
        const auto clamped = [](double v) { return std::clamp(v, 1.0, 2.0); };
        for (std::uint64_t seed : {4ull, 5ull}) {
            const auto rec = testutil::gaussian_rec(1024, seed);
            CHECK(features::fractal_dimension(rec, 12) ==
                  doctest::Approx(clamped(oracle::higuchi_dimension(amplitudes_of(rec), 12))).epsilon(1e-9));
        }
        const auto am = testutil::am_tone_rec(2048, 0.6, 0.02);
        CHECK(features::fractal_dimension(am, 16) ==
              doctest::Approx(clamped(oracle::higuchi_dimension(amplitudes_of(am), 16))).epsilon(1e-9));
    }
    SUBCASE("argument bounds") {
        CHECK_THROWS_AS(features::fractal_dimension(testutil::gaussian_rec(64, 1), 1), InvalidArgumentError);
        CHECK_THROWS_AS(features::fractal_dimension(testutil::gaussian_rec(64, 1), 16), InvalidArgumentError);
    }
}

TEST_CASE("LZ76 phrase counting") {
    SUBCASE("known parses") {
        CHECK(features::lz76_phrase_count(bits_of("0001101001000101")) == 6);
        CHECK(features::lz76_phrase_count(bits_of(std::string(32, '0'))) == 2);
        CHECK(features::lz76_phrase_count(bits_of("01")) == 2);
        std::string alt;
        for (int i = 0; i < 64; ++i) alt += (i % 2 == 0) ? '0' : '1';
        CHECK(features::lz76_phrase_count(bits_of(alt)) == 3);
        CHECK(features::lz76_phrase_count(bits_of("1")) == 1);
        CHECK(features::lz76_phrase_count({}) == 0);
    }
    SUBCASE("agrees with the substring-search oracle on random strings") {
        Rng rng(99);
        for (int trial = 0; trial < 300; ++trial) {
            const std::size_t len = 1 + static_cast<std::size_t>(rng.uniform(0.0, 1.0) * 63.0);
            std::string s;
            for (std::size_t i = 0; i < len; ++i) s += rng.uniform(0.0, 1.0) < 0.5 ? '0' : '1';
            CHECK(features::lz76_phrase_count(bits_of(s)) == oracle::lz76_substring(s));
        }
    }
    SUBCASE("normalized complexity of a constant recording") {
        // constant amplitude binarizes to all zeros (strict > median), c = 2
        const double expect = 2.0 * std::log2(256.0) / 256.0;
        CHECK(features::lz_complexity(testutil::constant_rec(256, {1.0, 0.0})) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("noise approaches unit normalized complexity") {
        const double v = features::lz_complexity(testutil::gaussian_rec(4096, 31));
        CHECK(v > 0.7);
        CHECK(v < 1.3);
    }
}

TEST_CASE("standardization") {
    Eigen::MatrixXd raw(4, 3);
    raw << 1.0, 5.0, 2.0,
           3.0, 5.0, 4.0,
           5.0, 5.0, 6.0,
           7.0, 5.0, 8.0;
    const auto s = features::fit_standardization(raw);
    CHECK(s.mean(0) == doctest::Approx(4.0));
    CHECK(s.stddev(1) == 0.0);  // constant column
    const Eigen::MatrixXd z = features::apply_standardization(raw, s);
    for (Eigen::Index c : {0, 2}) {
        CHECK(z.col(c).mean() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::sqrt(z.col(c).squaredNorm() / 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(z.col(1).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd wrong(2, 2);
    wrong.setZero();
    CHECK_THROWS_AS(features::apply_standardization(wrong, s), DimensionMismatchError);
}

TEST_CASE("extract_features applies per-recording caps consistently") {
    const auto rec = signal_io::synthesize(signal_io::modulation_by_name("16QAM"), 1024, 18.0, 6).recording;
    FeatureConfig cfg;  // embed 64 (< 1024/4), fft 128, k_max 16 (< 1024/8)
    const auto f = features::extract_features(rec, cfg);
    CHECK(f.temporal_kurtosis == features::temporal_kurtosis(rec));
    CHECK(f.singular_spectrum_entropy == features::singular_spectrum_entropy(rec, 64));
    CHECK(f.bispectral_integration == features::bispectral_integration(rec, 128));
    CHECK(f.bandwidth_factor == features::bandwidth_factor(rec));
    CHECK(f.energy_concentration == features::energy_concentration(rec));
    CHECK(f.fluctuation_index == features::fluctuation_index(rec));
    CHECK(f.fractal_dimension == features::fractal_dimension(rec, 16));
    CHECK(f.lz_complexity == features::lz_complexity(rec));

    // short recording: embed capped at N/4 = 30, k_max at N/8 = 15
    FeatureConfig small = cfg;
    small.fft_size = 32;
    const auto short_rec = signal_io::synthesize(signal_io::modulation_by_name("BPSK"), 120, 18.0, 6).recording;
    const auto g = features::extract_features(short_rec, small);
    CHECK(g.singular_spectrum_entropy == features::singular_spectrum_entropy(short_rec, 30));
    CHECK(g.fractal_dimension == features::fractal_dimension(short_rec, 15));
}

TEST_CASE("extract_all dataset assembly") {
    FeatureConfig cfg;
    GroupingMap grouping;

    SUBCASE("class ids are dense and sorted by category name") {
        std::vector<LabeledRecording> recs;
        recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("FM"), 512, 20.0, 1));
        recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("BPSK"), 512, 20.0, 2));
        recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("QPSK"), 512, 20.0, 3));
        recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("AM"), 512, 20.0, 4));
        const auto ds = features::extract_all(recs, cfg, grouping);
        CHECK(ds.class_names == std::vector<std::string>{"AM", "FM", "PSK"});
        CHECK(ds.labels == std::vector<int>{1, 2, 2, 0});
        CHECK(ds.rows() == 4);
        CHECK(ds.cols() == features::kFeatureCount);
    }

    SUBCASE("grouping overrides splice labels into custom categories") {
        grouping.initial["BPSK"] = "binary";
        grouping.initial["2FSK"] = "binary";
        std::vector<LabeledRecording> recs;
        recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("BPSK"), 512, 20.0, 1));
        recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("2FSK"), 512, 20.0, 2));
        recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("QPSK"), 512, 20.0, 3));
        const auto ds = features::extract_all(recs, cfg, grouping);
        CHECK(ds.class_names == std::vector<std::string>{"PSK", "binary"});
        CHECK(ds.labels == std::vector<int>{1, 1, 0});
    }

    SUBCASE("identical recordings produce identical rows") {
        const auto rec = signal_io::synthesize(signal_io::modulation_by_name("8PSK"), 512, 20.0, 5);
        std::vector<LabeledRecording> recs{rec, rec, rec};
        const auto ds = features::extract_all(recs, cfg, grouping);
        CHECK((ds.raw.row(0).array() == ds.raw.row(1).array()).all());
        CHECK((ds.raw.row(0).array() == ds.raw.row(2).array()).all());
        // identical rows make every column constant, so standardization zeroes them
        CHECK(ds.features.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("row order follows input order") {
        std::vector<LabeledRecording> recs;
        for (std::uint64_t s = 0; s < 6; ++s)
            recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("4ASK"), 512, 20.0, s));
        const auto fwd = features::extract_all(recs, cfg, grouping);
        std::reverse(recs.begin(), recs.end());
        const auto rev = features::extract_all(recs, cfg, grouping);
        for (Eigen::Index i = 0; i < 6; ++i)
            CHECK((fwd.raw.row(i).array() == rev.raw.row(5 - i).array()).all());
    }

    SUBCASE("scale and global phase wash out after power normalization") {
        auto base = signal_io::synthesize(signal_io::modulation_by_name("16QAM"), 1024, 25.0, 9).recording;
        auto scaled = base;
        for (auto& z : scaled.samples) z *= cdouble(3.7, 0.0) * std::polar(1.0, 0.83);
        const auto fa = features::extract_features(signal_io::normalize_power(base), cfg);
        const auto fb = features::extract_features(signal_io::normalize_power(scaled), cfg);
        const auto va = fa.as_array();
        const auto vb = fb.as_array();
        for (int k = 0; k < features::kFeatureCount; ++k)
            CHECK(vb[k] == doctest::Approx(va[k]).epsilon(1e-9));
    }

    SUBCASE("a broken recording reports its row index") {
        std::vector<LabeledRecording> recs;
        recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("AM"), 512, 20.0, 1));
        LabeledRecording bad;
        bad.label = signal_io::modulation_by_name("AM");
        bad.recording = testutil::constant_rec(512, {0.0, 0.0});
        recs.push_back(bad);
        try {
            features::extract_all(recs, cfg, grouping);
            FAIL("expected FeatureError");
        } catch (const FeatureError& e) {
            CHECK(e.sample == 1);
        }
        CHECK_THROWS_AS(features::extract_all(std::vector<LabeledRecording>{}, cfg, grouping),
                        InvalidArgumentError);
    }
}

TEST_CASE("feature separation between easy and hard envelopes") {
    // BPSK (two-point constellation) vs 16QAM (multi-ring) should separate
    // cleanly on the fluctuation index at high SNR
    FeatureConfig cfg;
    GroupingMap grouping;
    std::vector<double> f_bpsk, f_qam;
    for (std::uint64_t s = 0; s < 20; ++s) {
        f_bpsk.push_back(features::fluctuation_index(
            signal_io::synthesize(signal_io::modulation_by_name("BPSK"), 2048, 30.0, s).recording));
        f_qam.push_back(features::fluctuation_index(
            signal_io::synthesize(signal_io::modulation_by_name("16QAM"), 2048, 30.0, 100 + s).recording));
    }
    auto mean_std = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        return std::pair<double, double>(m, std::sqrt(var / static_cast<double>(v.size())));
    };
    const auto [mb, sb] = mean_std(f_bpsk);
    const auto [mq, sq] = mean_std(f_qam);
    const double pooled = std::sqrt(0.5 * (sb * sb + sq * sq));
    CHECK(std::abs(mb - mq) > 2.0 * pooled);
}
