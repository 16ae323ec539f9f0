#ifndef RADCLASS_TYPES_HPP
#define RADCLASS_TYPES_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "radclass/errors.hpp"

namespace radclass {

using cdouble = std::complex<double>;

/// Minimum recording length accepted anywhere in the pipeline.
inline constexpr std::size_t kMinRecordingLength = 64;

/// One complex baseband capture.
struct IQRecording {
    std::vector<cdouble> samples;
    double sample_rate = 1.0;  // Hz
    /// Number of samples at each end affected by shaping-filter transients
    /// (0 for loaded or unshaped data). Amplitude-statistics tests trim these.
    std::size_t edge_transient = 0;

    std::size_t size() const { return samples.size(); }

    /// Throws ValidationError on NaN/Inf samples, N < 64, or bad sample rate.
    void validate() const;

    /// Mean power (1/N) * sum |z|^2.
    double mean_power() const;
};

struct ModulationLabel {
    std::string name;               // e.g. "QPSK"
    std::string family;             // e.g. "PSK"
    std::optional<int> order = {};  // constellation size; empty for analog

    bool operator==(const ModulationLabel& o) const = default;
};

struct LabeledRecording {
    IQRecording recording;
    ModulationLabel label;
    double snr_db = 0.0;
};

/// Stratified fold partition: fold_of[i] is the fold id of sample i.
struct FoldAssignment {
    std::vector<int> fold_of;
    int fold_count = 0;

    std::size_t size() const { return fold_of.size(); }
};

}  // namespace radclass

#endif
