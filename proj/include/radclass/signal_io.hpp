#ifndef RADCLASS_SIGNAL_IO_HPP
#define RADCLASS_SIGNAL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "radclass/types.hpp"

namespace radclass::signal_io {

/// Rescales to unit mean power: z_bar(n) = z(n) / sqrt(mean |z|^2).
/// Throws ZeroSignalError when the mean power is at the subnormal floor.
IQRecording normalize_power(const IQRecording& rec);

/// Dataset container: JSON manifest + raw little-endian float32 I/Q blobs.
/// A recording of N samples occupies exactly 8*N bytes in its blob.
std::vector<LabeledRecording> load_dataset(const std::filesystem::path& manifest_path);

/// Writes `manifest_path` plus a single sibling blob file `<stem>.bin`
/// holding all recordings back to back. Inverse of load_dataset.
void save_dataset(const std::vector<LabeledRecording>& recs, const std::filesystem::path& manifest_path);

/// Known synthesizable modulations. name -> (family, order).
struct ModulationSpec {
    ModulationLabel label;
    int samples_per_symbol = 8;
};

/// Catalog lookup by canonical name ("BPSK", "16QAM", "AM", ...).
/// Throws UnsupportedModulationError for unknown names.
ModulationLabel modulation_by_name(const std::string& name);

/// All catalog names, in a fixed order.
const std::vector<std::string>& modulation_catalog();

/// Default variants for a family name ("PSK" -> {BPSK, QPSK, 8PSK}, ...).
std::vector<std::string> family_variants(const std::string& family);

/// Clean and noise parts of one synthesized draw, before power
/// normalization. synthesize() returns clean+noise, normalized.
struct SynthesisParts {
    std::vector<cdouble> clean;
    std::vector<cdouble> noise;
    std::size_t edge_transient = 0;
};

/// Deterministic for a fixed seed. Digital linear families (PSK/QAM/ASK) are
/// root-raised-cosine shaped (roll-off 0.35, 8 samples/symbol); FSK is
/// continuous-phase with a rectangular frequency pulse; AM/FM carry a
/// deterministic tone message. SNR is clean power over noise power.
SynthesisParts synthesize_parts(const ModulationLabel& label, std::size_t n, double snr_db, std::uint64_t seed);

/// Power-normalized sum of the parts, quantized to float32 so that the
/// container round-trips bit-exactly.
LabeledRecording synthesize(const ModulationLabel& label, std::size_t n, double snr_db, std::uint64_t seed);

/// Stratified f-fold partition, deterministic for a fixed seed.
/// Throws TooFewSamplesError when any class has fewer than f members.
FoldAssignment assign_folds(std::size_t n_samples, const std::vector<int>& labels, int f, std::uint64_t seed);

}  // namespace radclass::signal_io

#endif
