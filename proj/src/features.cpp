#include "radclass/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <unsupported/Eigen/FFT>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace radclass::features {

namespace {

std::vector<double> amplitudes(const IQRecording& rec) {
    std::vector<double> a(rec.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(rec.samples[i]);
    return a;
}

std::vector<double> power_spectrum(const IQRecording& rec) {
    Eigen::FFT<double> fft;
    std::vector<cdouble> out;
    fft.fwd(out, rec.samples);
    std::vector<double> p(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) p[k] = std::norm(out[k]);
    return p;
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "kurtosis", "ss_entropy", "bispec", "bw_factor", "energy_conc", "fluct_idx", "fractal_dim", "lz"};
    return names;
}

double temporal_kurtosis(const IQRecording& rec) {
    double m2 = 0.0, m4 = 0.0;
    for (const auto& z : rec.samples) {
        const double p = std::norm(z);
        m2 += p;
        m4 += p * p;
    }
    const double n = static_cast<double>(rec.size());
    m2 /= n;
    m4 /= n;
    if (!(m2 >= std::numeric_limits<double>::min())) throw ZeroSignalError("zero mean square amplitude");
    return m4 / (m2 * m2);
}

double singular_spectrum_entropy(const IQRecording& rec, std::size_t embed_dim) {
    const std::size_t n = rec.size();
    if (embed_dim < 2 || embed_dim > n / 2) {
        throw InvalidArgumentError("embed_dim must satisfy 2 <= L <= N/2");
    }
    const std::vector<double> a = amplitudes(rec);
    const std::size_t rows = embed_dim;
    const std::size_t cols = n - embed_dim + 1;

    Eigen::MatrixXd traj(rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) traj(r, c) = a[c + r];
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(traj);
    const Eigen::VectorXd sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    if (!(sigma_max >= std::numeric_limits<double>::min())) {
        throw ZeroSignalError("all singular values are zero");
    }

    // standard rank cutoff; removes numerical-noise singular values so a
    // rank-1 trajectory really gives zero entropy
    const double cutoff = sigma_max * static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
    double total = 0.0;
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
        if (sigma(k) > cutoff) total += sigma(k);
    }

    double h = 0.0;
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
        if (sigma(k) > cutoff) {
            const double p = sigma(k) / total;
            h -= p * std::log(p);
        }
    }
    h /= std::log(static_cast<double>(embed_dim));
    return std::clamp(h, 0.0, 1.0);
}

double bispectral_integration(const IQRecording& rec, std::size_t fft_size, std::size_t n_segments) {
    if (!is_power_of_two(fft_size) || fft_size < 8) {
        throw InvalidArgumentError("fft_size must be a power of two >= 8");
    }
    const std::size_t n = rec.size();
    const std::size_t hop = fft_size / 2;
    const std::size_t max_segments = n >= fft_size ? 1 + (n - fft_size) / hop : 0;
    const std::size_t segments = n_segments == 0 ? max_segments : n_segments;
    if (segments < 4 || segments > max_segments) {
        throw TooShortError("need at least 4 half-overlapping segments, have " + std::to_string(max_segments));
    }

    std::vector<double> window(fft_size);
    for (std::size_t t = 0; t < fft_size; ++t) {
        window[t] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(t) / static_cast<double>(fft_size)));
    }

    const std::size_t half = fft_size / 2;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(half), static_cast<Eigen::Index>(half));

    Eigen::FFT<double> fft;
    std::vector<cdouble> seg(fft_size), spec;
    for (std::size_t s = 0; s < segments; ++s) {
        const std::size_t start = s * hop;
        for (std::size_t t = 0; t < fft_size; ++t) seg[t] = rec.samples[start + t] * window[t];
        fft.fwd(spec, seg);
        for (std::size_t f1 = 0; f1 < half; ++f1) {
            for (std::size_t f2 = 0; f2 <= f1 && f1 + f2 < half; ++f2) {
                acc(static_cast<Eigen::Index>(f1), static_cast<Eigen::Index>(f2)) +=
                    spec[f1] * spec[f2] * std::conj(spec[f1 + f2]);
            }
        }
    }

    double integral = 0.0;
    for (std::size_t f1 = 0; f1 < half; ++f1) {
        for (std::size_t f2 = 0; f2 <= f1 && f1 + f2 < half; ++f2) {
            integral += std::abs(acc(static_cast<Eigen::Index>(f1), static_cast<Eigen::Index>(f2))) /
                        static_cast<double>(segments);
        }
    }
    return std::log1p(integral);
}

double bandwidth_factor(const IQRecording& rec) {
    const std::vector<double> p = power_spectrum(rec);
    const std::size_t n = p.size();
    const double fs = rec.sample_rate;

    double total = 0.0;
    for (double v : p) total += v;
    if (!(total >= std::numeric_limits<double>::min())) throw ZeroSignalError("zero spectrum");

    double centroid = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = (k <= (n - 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n)) *
                         fs / static_cast<double>(n);
        centroid += std::abs(f) * p[k];
    }
    centroid /= total;

    double spread = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = (k <= (n - 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n)) *
                         fs / static_cast<double>(n);
        const double d = std::abs(f) - centroid;
        spread += d * d * p[k];
    }
    const double be = std::sqrt(spread / total);
    return be / std::max(centroid, 1e-6 * fs);
}

double energy_concentration(const IQRecording& rec) {
    std::vector<double> p = power_spectrum(rec);
    double total = 0.0;
    for (double v : p) total += v;
    if (!(total >= std::numeric_limits<double>::min())) throw ZeroSignalError("zero spectrum");

    const std::size_t top = static_cast<std::size_t>(
        std::ceil(0.1 * static_cast<double>(p.size())));
    std::partial_sort(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(top), p.end(), std::greater<double>());
    double head = 0.0;
    for (std::size_t k = 0; k < top; ++k) head += p[k];
    return head / total;
}

double fluctuation_index(const IQRecording& rec) {
    const std::size_t n = rec.size();
    double mean = 0.0;
    for (const auto& z : rec.samples) mean += std::norm(z);
    mean /= static_cast<double>(n);
    if (!(mean >= std::numeric_limits<double>::min())) throw ZeroSignalError("zero mean power");

    double var = 0.0;
    for (const auto& z : rec.samples) {
        const double d = std::norm(z) - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    return std::sqrt(var) / mean;
}

double fractal_dimension(const IQRecording& rec, std::size_t k_max) {
    if (k_max < 2) throw InvalidArgumentError("k_max must be >= 2");
    const std::size_t n = rec.size();
    if (n < 8 * k_max) throw InvalidArgumentError("need N >= 8 * k_max");
    const std::vector<double> a = amplitudes(rec);

    std::vector<double> xs, ys;  // (ln 1/k, ln L(k))
    for (std::size_t k = 1; k <= k_max; ++k) {
        double lk = 0.0;
        std::size_t m_used = 0;
        for (std::size_t m = 0; m < k; ++m) {
            const std::size_t terms = (n - 1 - m) / k;
            if (terms == 0) continue;
            double sum = 0.0;
            for (std::size_t i = 1; i <= terms; ++i) sum += std::abs(a[m + i * k] - a[m + (i - 1) * k]);
            lk += sum * (static_cast<double>(n) - 1.0) / (static_cast<double>(terms) * static_cast<double>(k)) /
                  static_cast<double>(k);
            ++m_used;
        }
        if (m_used == 0) continue;
        lk /= static_cast<double>(m_used);
        if (lk > 0.0) {
            xs.push_back(std::log(1.0 / static_cast<double>(k)));
            ys.push_back(std::log(lk));
        }
    }
    // constant amplitude: every curve length is zero and the fit is
    // undefined; a constant curve is a line
    if (xs.size() < 2) return 1.0;

    const double n_pts = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx);
    return std::clamp(slope, 1.0, 2.0);
}

std::size_t lz76_phrase_count(const std::vector<std::uint8_t>& bits) {
    const std::size_t n = bits.size();
    if (n == 0) return 0;
    if (n == 1) return 1;
    // Kaspar-Schuster formulation of the LZ76 exhaustive parse
    std::size_t c = 1, l = 1, i = 0, k = 1, k_max = 1;
    while (true) {
        if (bits[i + k - 1] == bits[l + k - 1]) {
            ++k;
            if (l + k > n) {
                ++c;
                break;
            }
        } else {
            k_max = std::max(k, k_max);
            ++i;
            if (i == l) {
                ++c;
                l += k_max;
                if (l + 1 > n) break;
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        }
    }
    return c;
}

double lz_complexity(const IQRecording& rec) {
    const std::vector<double> a = amplitudes(rec);
    std::vector<double> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = a[i] > median ? 1 : 0;

    const double c = static_cast<double>(lz76_phrase_count(bits));
    return c * std::log2(static_cast<double>(n)) / static_cast<double>(n);
}

FeatureVector extract_features(const IQRecording& rec, const FeatureConfig& cfg) {
    const std::size_t n = rec.size();
    const std::size_t embed = std::max<std::size_t>(2, std::min(cfg.embed_dim, n / 4));
    const std::size_t kmax = std::max<std::size_t>(2, std::min(cfg.k_max, n / 8));

    FeatureVector f;
    f.temporal_kurtosis = temporal_kurtosis(rec);
    f.singular_spectrum_entropy = singular_spectrum_entropy(rec, embed);
    f.bispectral_integration = bispectral_integration(rec, cfg.fft_size);
    f.bandwidth_factor = bandwidth_factor(rec);
    f.energy_concentration = energy_concentration(rec);
    f.fluctuation_index = fluctuation_index(rec);
    f.fractal_dimension = fractal_dimension(rec, kmax);
    f.lz_complexity = lz_complexity(rec);
    return f;
}

Standardization fit_standardization(const Eigen::MatrixXd& raw) {
    Standardization s;
    const double m = static_cast<double>(raw.rows());
    s.mean = raw.colwise().sum() / m;
    s.stddev.resize(raw.cols());
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        double var = 0.0;
        for (Eigen::Index r = 0; r < raw.rows(); ++r) {
            const double d = raw(r, c) - s.mean(c);
            var += d * d;
        }
        var /= m;
        const double sd = std::sqrt(var);
        // constant column: recorded as 0, standardizes to 0
        s.stddev(c) = sd > 0.0 && raw.rows() > 1 ? sd : 0.0;
    }
    return s;
}

Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& raw, const Standardization& s) {
    if (raw.cols() != s.mean.size()) throw DimensionMismatchError("standardization parameter size mismatch");
    Eigen::MatrixXd out(raw.rows(), raw.cols());
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        if (s.stddev(c) == 0.0) {
            out.col(c).setZero();
        } else {
            out.col(c) = (raw.col(c).array() - s.mean(c)) / s.stddev(c);
        }
    }
    return out;
}

LabeledDataset extract_all(const std::vector<LabeledRecording>& recs, const FeatureConfig& cfg,
                           const GroupingMap& grouping) {
    if (recs.empty()) throw InvalidArgumentError("no recordings");
    const std::size_t m = recs.size();

    // dense class ids: categories sorted by name
    std::set<std::string> category_set;
    for (const auto& r : recs) category_set.insert(grouping.category_of(r.label));
    std::map<std::string, int> class_of;
    LabeledDataset ds;
    for (const auto& c : category_set) {
        class_of[c] = static_cast<int>(ds.class_names.size());
        ds.class_names.push_back(c);
    }

    ds.raw.resize(static_cast<Eigen::Index>(m), kFeatureCount);
    ds.labels.resize(m);
    for (std::size_t i = 0; i < m; ++i) ds.labels[i] = class_of.at(grouping.category_of(recs[i].label));

    std::vector<std::string> row_errors(m);
    bool failed = false;

#pragma omp parallel for schedule(dynamic)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        try {
            const FeatureVector f = extract_features(recs[i].recording, cfg);
            const auto vals = f.as_array();
            for (int c = 0; c < kFeatureCount; ++c) ds.raw(static_cast<Eigen::Index>(i), c) = vals[c];
        } catch (const std::exception& e) {
            row_errors[i] = e.what();
#pragma omp atomic write
            failed = true;
        }
    }
    if (failed) {
        for (std::size_t i = 0; i < m; ++i) {
            if (!row_errors[i].empty()) throw FeatureError(i, row_errors[i]);
        }
    }

    ds.standardization = fit_standardization(ds.raw);
    ds.features = apply_standardization(ds.raw, ds.standardization);
    ds.feature_names.assign(feature_names().begin(), feature_names().end());
    return ds;
}

}  // namespace radclass::features
