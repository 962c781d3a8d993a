#pragma once

#include <string>
#include <vector>

#include "sdc/signal/audio.hpp"
#include "sdc/spectral/loss.hpp"

namespace sdc {

inline constexpr double kDbCap = 120.0;

struct BandSpec {
    double low = 0.0;
    double high = 0.0;

    // InvalidConfig unless 0 <= low < high <= nyquist.
    void validate(double nyquist) const;
    std::string label() const;  // "0-8000"
};

inline const BandSpec kLowBand{0.0, 8000.0};
inline const BandSpec kHighBand{8000.0, 16000.0};
inline const BandSpec kInterfaceBand{7900.0, 8100.0};

// 10 log10(|ref|^2 / |ref - est|^2), clamped to [-120, 120] dB.
double sdr(const AudioBuffer& ref, const AudioBuffer& est);

// Scale-invariant SDR with the optimal projection of est onto ref.
double si_sdr(const AudioBuffer& ref, const AudioBuffer& est);

// Brick-wall band-pass over the whole signal: bins with low <= f < high are
// kept (the Nyquist bin is kept when high equals Nyquist).
AudioBuffer band_filter(const AudioBuffer& x, const BandSpec& band);

// Fraction of the signal energy inside the band.
double band_energy_fraction(const AudioBuffer& x, const BandSpec& band);

double band_sdr(const AudioBuffer& ref, const AudioBuffer& est, const BandSpec& band);

struct MetricEntry {
    std::string name;
    double value;
};

// Named values in insertion order; each name appears once.
struct MetricReport {
    std::vector<MetricEntry> entries;

    void set(const std::string& name, double value);
    bool has(const std::string& name) const;
    double get(const std::string& name) const;

    std::string to_text() const;
    std::string to_json() const;
};

MetricReport build_report(const AudioBuffer& ref, const AudioBuffer& est, const std::vector<BandSpec>& bands,
                          const std::vector<SpectralScale>& scales);

}  // namespace sdc
