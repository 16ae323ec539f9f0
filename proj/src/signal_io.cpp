#include "radclass/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "radclass/rng.hpp"

#include <json.hpp>

namespace radclass {

void IQRecording::validate() const {
    if (samples.size() < kMinRecordingLength) {
        throw ValidationError("recording too short: " + std::to_string(samples.size()) + " samples, need >= " +
                              std::to_string(kMinRecordingLength));
    }
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw ValidationError("sample_rate must be positive and finite");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].real()) || !std::isfinite(samples[i].imag())) {
            throw ValidationError("non-finite sample at index " + std::to_string(i));
        }
    }
}

double IQRecording::mean_power() const {
    double acc = 0.0;
    for (const auto& z : samples) acc += std::norm(z);
    return samples.empty() ? 0.0 : acc / static_cast<double>(samples.size());
}

namespace signal_io {

using nlohmann::json;

IQRecording normalize_power(const IQRecording& rec) {
    const double p = rec.mean_power();
    if (!(p >= std::numeric_limits<double>::min()) || !std::isfinite(p)) {
        throw ZeroSignalError("mean power is zero or below the subnormal floor");
    }
    IQRecording out = rec;
    const double scale = 1.0 / std::sqrt(p);
    for (auto& z : out.samples) z *= scale;
    return out;
}

// ---------------------------------------------------------------------------
// Dataset container
// ---------------------------------------------------------------------------

namespace {

json label_to_json(const ModulationLabel& l) {
    json j{{"name", l.name}, {"family", l.family}};
    if (l.order) {
        j["order"] = *l.order;
    } else {
        j["order"] = nullptr;
    }
    return j;
}

ModulationLabel label_from_json(const json& j) {
    ModulationLabel l;
    l.name = j.at("name").get<std::string>();
    l.family = j.at("family").get<std::string>();
    if (j.contains("order") && !j.at("order").is_null()) {
        const int order = j.at("order").get<int>();
        if (order <= 0) throw FormatError("label order must be positive");
        l.order = order;
    }
    if (l.family.empty()) throw FormatError("label family must be non-empty");
    return l;
}

}  // namespace

std::vector<LabeledRecording> load_dataset(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw FormatError("cannot open manifest: " + manifest_path.string());

    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw FormatError("malformed manifest JSON: " + std::string(e.what()));
    }

    std::vector<LabeledRecording> out;
    try {
        if (manifest.at("version").get<int>() != 1) {
            throw FormatError("unsupported container version");
        }
        const auto& entries = manifest.at("entries");
        const auto base = manifest_path.parent_path();

        // blob files are read once and sliced per entry
        std::map<std::string, std::vector<char>> blobs;

        for (const auto& e : entries) {
            const std::string file = e.at("file").get<std::string>();
            const std::uint64_t offset = e.at("offset_bytes").get<std::uint64_t>();
            const std::uint64_t n = e.at("n_samples").get<std::uint64_t>();

            auto it = blobs.find(file);
            if (it == blobs.end()) {
                std::ifstream bin(base / file, std::ios::binary);
                if (!bin) throw FormatError("cannot open blob file: " + file);
                std::vector<char> bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
                it = blobs.emplace(file, std::move(bytes)).first;
            }
            const auto& bytes = it->second;
            const std::uint64_t need = offset + 8 * n;
            if (bytes.size() < need) {
                throw FormatError("blob length mismatch in " + file + ": need " + std::to_string(need) + " bytes, have " +
                                  std::to_string(bytes.size()));
            }

            LabeledRecording rec;
            rec.label = label_from_json(e.at("label"));
            rec.snr_db = e.at("snr_db").get<double>();
            if (!std::isfinite(rec.snr_db)) throw FormatError("snr_db must be finite");
            rec.recording.sample_rate = e.at("sample_rate_hz").get<double>();
            rec.recording.samples.resize(n);
            for (std::uint64_t i = 0; i < n; ++i) {
                float iq[2];
                std::memcpy(iq, bytes.data() + offset + 8 * i, 8);
                rec.recording.samples[i] = cdouble(iq[0], iq[1]);
            }
            rec.recording.validate();
            out.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw FormatError("malformed manifest: " + std::string(e.what()));
    }
    return out;
}

void save_dataset(const std::vector<LabeledRecording>& recs, const std::filesystem::path& manifest_path) {
    const auto blob_name = manifest_path.stem().string() + ".bin";
    const auto blob_path = manifest_path.parent_path() / blob_name;

    std::ofstream bin(blob_path, std::ios::binary);
    if (!bin) throw FormatError("cannot write blob file: " + blob_path.string());

    json entries = json::array();
    std::uint64_t offset = 0;
    for (const auto& r : recs) {
        json e{{"file", blob_name},
               {"offset_bytes", offset},
               {"n_samples", r.recording.size()},
               {"sample_rate_hz", r.recording.sample_rate},
               {"label", label_to_json(r.label)},
               {"snr_db", r.snr_db}};
        entries.push_back(std::move(e));
        for (const auto& z : r.recording.samples) {
            const float iq[2] = {static_cast<float>(z.real()), static_cast<float>(z.imag())};
            bin.write(reinterpret_cast<const char*>(iq), 8);
        }
        offset += 8 * r.recording.size();
    }
    bin.close();

    json manifest{{"version", 1}, {"entries", std::move(entries)}};
    std::ofstream out(manifest_path);
    if (!out) throw FormatError("cannot write manifest: " + manifest_path.string());
    out << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

namespace {

constexpr int kSps = 8;           // samples per symbol
constexpr double kRollOff = 0.35;  // RRC roll-off
constexpr int kSpanSymbols = 8;    // RRC span (filter covers +/- span/2 symbols)

struct CatalogEntry {
    const char* name;
    const char* family;
    int order;  // 0 = analog
};

constexpr CatalogEntry kCatalog[] = {
    {"BPSK", "PSK", 2},  {"QPSK", "PSK", 4},  {"8PSK", "PSK", 8},  {"16QAM", "QAM", 16},
    {"64QAM", "QAM", 64}, {"2FSK", "FSK", 2},  {"4FSK", "FSK", 4},  {"2ASK", "ASK", 2},
    {"4ASK", "ASK", 4},  {"AM", "AM", 0},     {"FM", "FM", 0},
};

/// Root-raised-cosine taps, unit energy, odd length span*sps + 1.
std::vector<double> rrc_taps(int sps, double beta, int span) {
    const int half = span * sps / 2;
    std::vector<double> h(2 * half + 1);
    for (int i = -half; i <= half; ++i) {
        const double t = static_cast<double>(i) / sps;  // in symbol periods
        double v;
        if (i == 0) {
            v = 1.0 - beta + 4.0 * beta / M_PI;
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-12) {
            v = (beta / std::sqrt(2.0)) *
                ((1.0 + 2.0 / M_PI) * std::sin(M_PI / (4.0 * beta)) + (1.0 - 2.0 / M_PI) * std::cos(M_PI / (4.0 * beta)));
        } else {
            const double num = std::sin(M_PI * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(M_PI * t * (1.0 + beta));
            const double den = M_PI * t * (1.0 - 16.0 * beta * beta * t * t);
            v = num / den;
        }
        h[i + half] = v;
    }
    double energy = 0.0;
    for (double v : h) energy += v * v;
    const double s = 1.0 / std::sqrt(energy);
    for (double& v : h) v *= s;
    return h;
}

/// Shapes a symbol stream at kSps samples/symbol and returns n samples taken
/// once the filter is fully engaged.
std::vector<cdouble> shape_linear(const std::vector<cdouble>& symbols, std::size_t n) {
    static const std::vector<double> taps = rrc_taps(kSps, kRollOff, kSpanSymbols);
    const int half = static_cast<int>(taps.size() / 2);
    std::vector<cdouble> up(symbols.size() * kSps, cdouble(0.0, 0.0));
    for (std::size_t k = 0; k < symbols.size(); ++k) up[k * kSps] = symbols[k];

    std::vector<cdouble> out(n, cdouble(0.0, 0.0));
    for (std::size_t t = 0; t < n; ++t) {
        cdouble acc(0.0, 0.0);
        for (int j = 0; j < static_cast<int>(taps.size()); ++j) {
            const long src = static_cast<long>(t) + half - j;
            if (src >= 0 && src < static_cast<long>(up.size()) && up[src] != cdouble(0.0, 0.0)) {
                acc += taps[j] * up[src];
            }
        }
        out[t] = acc;
    }
    return out;
}

std::vector<cdouble> psk_symbols(int order, std::size_t count, Rng& rng) {
    std::vector<cdouble> s(count);
    for (auto& v : s) {
        const double phase = 2.0 * M_PI * static_cast<double>(rng.below(order)) / order;
        v = std::polar(1.0, phase);
    }
    return s;
}

std::vector<cdouble> qam_symbols(int order, std::size_t count, Rng& rng) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (side * side != order) {
        throw UnsupportedModulationError("QAM order must be a perfect square, got " + std::to_string(order));
    }
    // levels -(side-1), ..., side-1 step 2; unit mean symbol energy
    const double scale = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
    std::vector<cdouble> s(count);
    for (auto& v : s) {
        const int a = static_cast<int>(rng.below(side));
        const int b = static_cast<int>(rng.below(side));
        v = scale * cdouble(2 * a - side + 1, 2 * b - side + 1);
    }
    return s;
}

std::vector<cdouble> ask_symbols(int order, std::size_t count, Rng& rng) {
    // unipolar levels 0..order-1 (order 2 is on-off keying)
    double ms = 0.0;
    for (int i = 0; i < order; ++i) ms += static_cast<double>(i) * i;
    ms /= order;
    const double scale = 1.0 / std::sqrt(ms);
    std::vector<cdouble> s(count);
    for (auto& v : s) v = cdouble(scale * static_cast<double>(rng.below(order)), 0.0);
    return s;
}

std::vector<cdouble> fsk_signal(int order, std::size_t n, Rng& rng) {
    // continuous-phase FSK, modulation index 1, rectangular frequency pulse
    const double h = 1.0;
    std::vector<cdouble> out(n);
    double phase = rng.uniform(0.0, 2.0 * M_PI);
    std::size_t t = 0;
    while (t < n) {
        const int k = static_cast<int>(rng.below(order));
        const double inc = 2.0 * M_PI * h * (k - 0.5 * (order - 1)) / kSps;
        for (int s = 0; s < kSps && t < n; ++s, ++t) {
            out[t] = std::polar(1.0, phase);
            phase += inc;
        }
    }
    return out;
}

std::vector<cdouble> am_signal(std::size_t n, Rng& rng) {
    // 50% depth tone message, random start phase
    const double fm = 1.0 / 128.0;  // cycles per sample
    const double phi0 = rng.uniform(0.0, 2.0 * M_PI);
    std::vector<cdouble> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = cdouble(1.0 + 0.5 * std::sin(2.0 * M_PI * fm * t + phi0), 0.0);
    }
    return out;
}

std::vector<cdouble> fm_signal(std::size_t n, Rng& rng) {
    const double fm = 1.0 / 128.0;    // message, cycles per sample
    const double fdev = 1.0 / 32.0;   // peak deviation, cycles per sample
    const double phi0 = rng.uniform(0.0, 2.0 * M_PI);
    const double msg_phi = rng.uniform(0.0, 2.0 * M_PI);
    std::vector<cdouble> out(n);
    double phase = phi0;
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = std::polar(1.0, phase);
        phase += 2.0 * M_PI * fdev * std::sin(2.0 * M_PI * fm * t + msg_phi);
    }
    return out;
}

}  // namespace

ModulationLabel modulation_by_name(const std::string& name) {
    for (const auto& e : kCatalog) {
        if (name == e.name) {
            ModulationLabel l{e.name, e.family, e.order > 0 ? std::optional<int>(e.order) : std::nullopt};
            return l;
        }
    }
    throw UnsupportedModulationError("unknown modulation name: " + name);
}

const std::vector<std::string>& modulation_catalog() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : kCatalog) v.push_back(e.name);
        return v;
    }();
    return names;
}

std::vector<std::string> family_variants(const std::string& family) {
    std::vector<std::string> v;
    for (const auto& e : kCatalog) {
        if (family == e.family) v.push_back(e.name);
    }
    if (v.empty()) throw UnsupportedModulationError("unknown modulation family: " + family);
    return v;
}

SynthesisParts synthesize_parts(const ModulationLabel& label, std::size_t n, double snr_db, std::uint64_t seed) {
    if (n < kMinRecordingLength) {
        throw InvalidArgumentError("synthesize needs n >= " + std::to_string(kMinRecordingLength));
    }
    Rng rng(seed);
    SynthesisParts parts;

    const std::string& fam = label.family;
    const int order = label.order.value_or(0);
    const std::size_t n_sym = n / kSps + kSpanSymbols + 2;

    if (fam == "PSK" || fam == "QAM" || fam == "ASK") {
        if (order < 2) throw UnsupportedModulationError(fam + " needs an order >= 2");
        std::vector<cdouble> symbols;
        if (fam == "PSK") {
            symbols = psk_symbols(order, n_sym, rng);
        } else if (fam == "QAM") {
            symbols = qam_symbols(order, n_sym, rng);
        } else {
            symbols = ask_symbols(order, n_sym, rng);
        }
        parts.clean = shape_linear(symbols, n);
        parts.edge_transient = 4 * kSps;
    } else if (fam == "FSK") {
        if (order < 2) throw UnsupportedModulationError("FSK needs an order >= 2");
        parts.clean = fsk_signal(order, n, rng);
        parts.edge_transient = 0;
    } else if (fam == "AM") {
        parts.clean = am_signal(n, rng);
        parts.edge_transient = 0;
    } else if (fam == "FM") {
        parts.clean = fm_signal(n, rng);
        parts.edge_transient = 0;
    } else {
        throw UnsupportedModulationError("unsupported modulation family: " + fam);
    }

    double ps = 0.0;
    for (const auto& z : parts.clean) ps += std::norm(z);
    ps /= static_cast<double>(n);

    const double pn = ps / std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(pn / 2.0);
    parts.noise.resize(n);
    for (auto& z : parts.noise) z = cdouble(sigma * rng.gaussian(), sigma * rng.gaussian());
    return parts;
}

LabeledRecording synthesize(const ModulationLabel& label, std::size_t n, double snr_db, std::uint64_t seed) {
    const SynthesisParts parts = synthesize_parts(label, n, snr_db, seed);

    IQRecording rec;
    rec.sample_rate = 1.0;  // normalized baseband
    rec.edge_transient = parts.edge_transient;
    rec.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) rec.samples[i] = parts.clean[i] + parts.noise[i];

    rec = normalize_power(rec);
    // quantize to the container's float32 precision so save/load round-trips
    for (auto& z : rec.samples) z = cdouble(static_cast<float>(z.real()), static_cast<float>(z.imag()));

    return LabeledRecording{std::move(rec), label, snr_db};
}

FoldAssignment assign_folds(std::size_t n_samples, const std::vector<int>& labels, int f, std::uint64_t seed) {
    if (f < 2) throw InvalidArgumentError("fold count must be >= 2");
    if (labels.size() != n_samples) throw InvalidArgumentError("labels size does not match n_samples");
    if (n_samples < static_cast<std::size_t>(f)) {
        throw TooFewSamplesError("need at least as many samples as folds");
    }

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n_samples; ++i) by_class[labels[i]].push_back(i);
    for (const auto& [cls, members] : by_class) {
        if (members.size() < static_cast<std::size_t>(f)) {
            throw TooFewSamplesError("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                                     " members, need >= " + std::to_string(f));
        }
    }

    FoldAssignment fa;
    fa.fold_count = f;
    fa.fold_of.assign(n_samples, -1);

    Rng rng(seed);
    // One continuous round-robin over all classes keeps both the global and
    // the per-class fold counts within 1 of each other.
    std::size_t cursor = 0;
    for (auto& [cls, members] : by_class) {
        rng.shuffle(members);
        for (std::size_t idx : members) {
            fa.fold_of[idx] = static_cast<int>(cursor % f);
            ++cursor;
        }
    }
    return fa;
}

}  // namespace signal_io
}  // namespace radclass

