#ifndef RADCLASS_FEATURES_HPP
#define RADCLASS_FEATURES_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "radclass/grouping.hpp"
#include "radclass/types.hpp"

namespace radclass::features {

inline constexpr int kFeatureCount = 8;

/// Fixed feature order. Index 1 is the singular spectrum entropy and index 2
/// the bispectral integration (0-based), so "the second and third attributes"
/// in reports always mean those two.
const std::array<std::string, kFeatureCount>& feature_names();

struct FeatureConfig {
    std::size_t embed_dim = 64;  // SSA trajectory window (capped at N/4)
    std::size_t fft_size = 128;  // bispectrum segment length
    std::size_t k_max = 16;      // Higuchi scale limit (capped at N/8)
};

struct FeatureVector {
    double temporal_kurtosis = 0.0;
    double singular_spectrum_entropy = 0.0;
    double bispectral_integration = 0.0;
    double bandwidth_factor = 0.0;
    double energy_concentration = 0.0;
    double fluctuation_index = 0.0;
    double fractal_dimension = 0.0;
    double lz_complexity = 0.0;

    std::array<double, kFeatureCount> as_array() const {
        return {temporal_kurtosis, singular_spectrum_entropy, bispectral_integration, bandwidth_factor,
                energy_concentration, fluctuation_index, fractal_dimension, lz_complexity};
    }
};

/// Per-column z-score parameters. Constant columns keep stddev 0 and
/// standardize to 0.
struct Standardization {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
};

Standardization fit_standardization(const Eigen::MatrixXd& raw);
Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& raw, const Standardization& s);

/// The dataset S: standardized feature rows plus class ids.
struct LabeledDataset {
    Eigen::MatrixXd features;  // standardized, m x n
    Eigen::MatrixXd raw;       // unstandardized values, m x n
    std::vector<int> labels;   // class ids, dense 0..K-1
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    Standardization standardization;

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index cols() const { return features.cols(); }
    int num_classes() const { return static_cast<int>(class_names.size()); }
};

// --- the eight features -----------------------------------------------------

/// mean(a^4) / mean(a^2)^2 with a = |z|.
double temporal_kurtosis(const IQRecording& rec);

/// Entropy of the singular spectrum of the L x (N-L+1) amplitude trajectory
/// matrix, normalized by ln(L) and clamped to [0, 1].
double singular_spectrum_entropy(const IQRecording& rec, std::size_t embed_dim);

/// log(1 + sum |B(f1,f2)|) over the principal bin region 0 <= f2 <= f1,
/// f1+f2 < fft_size/2, with B the segment-averaged direct bispectrum
/// estimate (Hann window, half-overlapping segments). n_segments 0 means
/// "as many half-overlapping segments as fit".
double bispectral_integration(const IQRecording& rec, std::size_t fft_size, std::size_t n_segments = 0);

/// RMS bandwidth over the absolute-frequency centroid of |FFT(z)|^2.
double bandwidth_factor(const IQRecording& rec);

/// Fraction of spectral energy in the top ceil(0.1 * N) power bins.
double energy_concentration(const IQRecording& rec);

/// stddev(|z|^2) / mean(|z|^2).
double fluctuation_index(const IQRecording& rec);

/// Higuchi fractal dimension of the amplitude sequence, clamped to [1, 2].
/// A constant amplitude returns 1.0.
double fractal_dimension(const IQRecording& rec, std::size_t k_max);

/// Median-binarized LZ76 phrase count, normalized as c * log2(N) / N.
double lz_complexity(const IQRecording& rec);

/// LZ76 phrase count of a binary string (exposed so tests can drive the
/// parser directly).
std::size_t lz76_phrase_count(const std::vector<std::uint8_t>& bits);

/// All eight features in the fixed order, with per-recording defaults
/// applied (embed_dim capped at N/4, k_max at N/8).
FeatureVector extract_features(const IQRecording& rec, const FeatureConfig& cfg);

/// Feature matrix for a recording list; rows parallelized, result identical
/// to sequential evaluation. Labels map to class ids via the grouping's
/// initial categories (sorted, dense).
LabeledDataset extract_all(const std::vector<LabeledRecording>& recs, const FeatureConfig& cfg,
                           const GroupingMap& grouping);

}  // namespace radclass::features

#endif
