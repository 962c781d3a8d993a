#include "sdc/metrics/metrics.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include "json.hpp"
#include <string>

#include "sdc/error.hpp"
#include "sdc/spectral/fft.hpp"

namespace sdc {
namespace {

double clamp_db(double db) { return std::max(-kDbCap, std::min(kDbCap, db)); }

double ratio_db(double num, double den) {
    if (den <= 0.0) return kDbCap;
    if (num <= 0.0) return -kDbCap;
    return clamp_db(10.0 * std::log10(num / den));
}

void check_pair(const AudioBuffer& ref, const AudioBuffer& est, const char* what) {
    require_same_shape(ref, est, what);
    if (ref.empty()) fail(ErrorKind::EmptySignal, std::string(what) + ": empty signal");
}

std::string format_band(double hz) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", hz);
    return buf;
}

}  // namespace

void BandSpec::validate(double nyquist) const {
    if (!(low >= 0.0 && low < high && high <= nyquist))
        fail(ErrorKind::InvalidConfig, "band " + label() + " Hz invalid for Nyquist " + format_band(nyquist));
}

std::string BandSpec::label() const { return format_band(low) + "-" + format_band(high); }

double sdr(const AudioBuffer& ref, const AudioBuffer& est) {
    check_pair(ref, est, "sdr");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        num += ref.samples[i] * ref.samples[i];
        const double e = ref.samples[i] - est.samples[i];
        den += e * e;
    }
    if (num == 0.0) fail(ErrorKind::UndefinedReference, "sdr: reference is all zero");
    return ratio_db(num, den);
}

double si_sdr(const AudioBuffer& ref, const AudioBuffer& est) {
    check_pair(ref, est, "si_sdr");
    double rr = 0.0, er = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        rr += ref.samples[i] * ref.samples[i];
        er += est.samples[i] * ref.samples[i];
    }
    if (rr == 0.0) fail(ErrorKind::UndefinedReference, "si_sdr: reference is all zero");
    const double alpha = er / rr;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double t = alpha * ref.samples[i];
        const double e = est.samples[i] - t;
        num += t * t;
        den += e * e;
    }
    return ratio_db(num, den);
}

AudioBuffer band_filter(const AudioBuffer& x, const BandSpec& band) {
    if (x.empty()) fail(ErrorKind::EmptySignal, "band_filter: empty signal");
    const double nyquist = x.sample_rate / 2.0;
    band.validate(nyquist);
    const std::size_t n = x.size();
    const RealFft fft(n);
    std::vector<std::complex<double>> spec(fft.bins());
    fft.forward(x.samples, spec);
    const double bin_hz = double(x.sample_rate) / double(n);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double f = double(k) * bin_hz;
        const bool is_nyquist = 2 * k == n;
        const bool keep = (f >= band.low && f < band.high) || (is_nyquist && band.high >= nyquist);
        if (!keep) spec[k] = 0.0;
    }
    AudioBuffer out = AudioBuffer::zeros(n, x.sample_rate);
    fft.inverse(spec, out.samples);
    for (auto& v : out.samples) v /= double(n);
    return out;
}

double band_energy_fraction(const AudioBuffer& x, const BandSpec& band) {
    const double total = energy(x.samples);
    if (total == 0.0) fail(ErrorKind::UndefinedReference, "band energy fraction of an all-zero signal");
    return energy(band_filter(x, band).samples) / total;
}

double band_sdr(const AudioBuffer& ref, const AudioBuffer& est, const BandSpec& band) {
    check_pair(ref, est, "band_sdr");
    const AudioBuffer r = band_filter(ref, band);
    const double band_energy = energy(r.samples);
    // Spectral leakage of the inverse transform leaves ~1e-30 of energy in an
    // empty band; treat anything that small as no content.
    if (band_energy <= 1e-12 * std::max(energy(ref.samples), 1e-300))
        fail(ErrorKind::UndefinedReference, "band_sdr: reference has no energy in band " + band.label() + " Hz");
    const AudioBuffer e = band_filter(est, band);
    return sdr(r, e);
}

void MetricReport::set(const std::string& name, double value) {
    for (auto& e : entries)
        if (e.name == name) {
            e.value = value;
            return;
        }
    entries.push_back({name, value});
}

bool MetricReport::has(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return true;
    return false;
}

double MetricReport::get(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e.value;
    fail(ErrorKind::InvalidConfig, "report has no metric " + name);
}

std::string MetricReport::to_text() const {
    std::string out;
    char buf[64];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "%.6f", e.value);
        out += e.name + "\t" + buf + "\n";
    }
    return out;
}

std::string MetricReport::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& e : entries) j[e.name] = e.value;
    return j.dump(2);
}

MetricReport build_report(const AudioBuffer& ref, const AudioBuffer& est, const std::vector<BandSpec>& bands,
                          const std::vector<SpectralScale>& scales) {
    MetricReport report;
    auto tagged = [](const std::string& metric, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            throw Error(e.kind(), metric + ": " + e.what());
        }
    };
    report.set("mel", tagged("mel", [&] { return mel_loss(ref, est, scales).value; }));
    report.set("stft", tagged("stft", [&] { return stft_loss(ref, est, scales).value; }));
    report.set("waveform", tagged("waveform", [&] { return waveform_loss(ref, est).value; }));
    report.set("si_sdr", tagged("si_sdr", [&] { return si_sdr(ref, est); }));
    report.set("sdr", tagged("sdr", [&] { return sdr(ref, est); }));
    for (const auto& band : bands) {
        const std::string name = "sdr_" + band.label();
        report.set(name, tagged(name, [&] { return band_sdr(ref, est, band); }));
    }
    return report;
}

}  // namespace sdc
