#include "sdc/spectral/loss.hpp"

#include <string>

#include "sdc/ad/ops.hpp"
#include "sdc/error.hpp"

namespace sdc {

std::string_view to_string(LossKind kind) {
    switch (kind) {
        case LossKind::Mel: return "mel";
        case LossKind::Stft: return "stft";
        case LossKind::Waveform: return "waveform";
        case LossKind::Gen: return "gen";
        case LossKind::Fm: return "fm";
        case LossKind::Cb: return "cb";
        case LossKind::Cmt: return "cmt";
    }
    return "unknown";
}

std::vector<SpectralScale> make_scales(int sample_rate, const std::vector<std::size_t>& fft_sizes,
                                       const std::vector<std::size_t>& n_mels) {
    if (fft_sizes.empty() || fft_sizes.size() != n_mels.size())
        fail(ErrorKind::InvalidConfig, "mel scales need matching, non-empty fft size and band count lists");
    std::vector<SpectralScale> scales;
    for (std::size_t i = 0; i < fft_sizes.size(); ++i) {
        StftConfig cfg{fft_sizes[i], fft_sizes[i] / 4};
        cfg.validate();
        scales.push_back({cfg, MelFilterbank(n_mels[i], fft_sizes[i], sample_rate)});
    }
    return scales;
}

std::vector<SpectralScale> default_scales(int sample_rate) {
    return make_scales(sample_rate, {2048, 512, 128}, {80, 40, 10});
}

namespace ad {
namespace {

template <typename T>
void check_pair(const Tensor<T>& ref, const Tensor<T>& est, const char* what) {
    if (ref.shape() != est.shape())
        fail(ErrorKind::ShapeMismatch, std::string(what) + ": reference " + to_string(ref.shape()) +
                                           " and estimate " + to_string(est.shape()) + " differ");
}

}  // namespace

template <typename T>
Tensor<T> log_mel(const Tensor<T>& x, const SpectralScale& scale) {
    const auto mag = stft_magnitude(x, scale.stft);
    const auto mel = matmul_const(mag, scale.mel.weights_as<T>(), scale.mel.n_mels());
    return log(add_scalar(mel, T(kLogFloor)));
}

template <typename T>
Tensor<T> mel_loss(const Tensor<T>& ref, const Tensor<T>& est, const std::vector<SpectralScale>& scales) {
    check_pair(ref, est, "mel_loss");
    const Tensor<T> r = ref.detach();
    Tensor<T> total;
    for (const auto& s : scales) {
        Tensor<T> target;
        {
            NoGradGuard guard;
            target = log_mel(r, s);
        }
        auto term = l1(target, log_mel(est, s));
        total = total.defined() ? add(total, term) : term;
    }
    return scale(total, T(1) / T(scales.size()));
}

template <typename T>
Tensor<T> stft_loss(const Tensor<T>& ref, const Tensor<T>& est, const std::vector<SpectralScale>& scales) {
    check_pair(ref, est, "stft_loss");
    const Tensor<T> r = ref.detach();
    Tensor<T> total;
    for (const auto& s : scales) {
        Tensor<T> target;
        {
            NoGradGuard guard;
            target = stft_magnitude(r, s.stft);
        }
        const auto mag = stft_magnitude(est, s.stft);
        const auto floor = T(kLogFloor);
        auto term = add(l1(log(add_scalar(target, floor)), log(add_scalar(mag, floor))), l1(target, mag));
        total = total.defined() ? add(total, term) : term;
    }
    return scale(total, T(1) / T(scales.size()));
}

template <typename T>
Tensor<T> waveform_loss(const Tensor<T>& ref, const Tensor<T>& est) {
    check_pair(ref, est, "waveform_loss");
    return l1(ref.detach(), est);
}

#define SDC_INSTANTIATE(T)                                                                                  \
    template Tensor<T> log_mel(const Tensor<T>&, const SpectralScale&);                                    \
    template Tensor<T> mel_loss(const Tensor<T>&, const Tensor<T>&, const std::vector<SpectralScale>&);   \
    template Tensor<T> stft_loss(const Tensor<T>&, const Tensor<T>&, const std::vector<SpectralScale>&);  \
    template Tensor<T> waveform_loss(const Tensor<T>&, const Tensor<T>&);
SDC_INSTANTIATE(float)
SDC_INSTANTIATE(double)
#undef SDC_INSTANTIATE

}  // namespace ad

namespace {

ad::Tensor<double> as_tensor(const AudioBuffer& x) { return ad::Tensor<double>::from({1, 1, x.size()}, x.samples); }

}  // namespace

LossValue mel_loss(const AudioBuffer& ref, const AudioBuffer& est, const std::vector<SpectralScale>& scales) {
    require_same_shape(ref, est, "mel_loss");
    ad::NoGradGuard guard;
    return {LossKind::Mel, ad::mel_loss(as_tensor(ref), as_tensor(est), scales).item()};
}

LossValue stft_loss(const AudioBuffer& ref, const AudioBuffer& est, const std::vector<SpectralScale>& scales) {
    require_same_shape(ref, est, "stft_loss");
    ad::NoGradGuard guard;
    return {LossKind::Stft, ad::stft_loss(as_tensor(ref), as_tensor(est), scales).item()};
}

LossValue waveform_loss(const AudioBuffer& ref, const AudioBuffer& est) {
    require_same_shape(ref, est, "waveform_loss");
    ad::NoGradGuard guard;
    return {LossKind::Waveform, ad::waveform_loss(as_tensor(ref), as_tensor(est)).item()};
}

}  // namespace sdc
