#include "dimeron/spectrum.hpp"

#include "dimeron/errors.hpp"

#include <cmath>
#include <utility>

namespace dimeron {

std::size_t SpectrumAxis::size() const {
    if (!(step > 0.0) || max < min)
        throw ConfigError("spectrum axis: need step > 0 and max >= min");
    return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
}

std::vector<double> SpectrumAxis::points() const {
    const std::size_t n = size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = min + static_cast<double>(i) * step;
    return out;
}

std::vector<double> gaussian_kernel(double width, double step) {
    if (!(width > 0.0) || !(step > 0.0))
        throw ConfigError("gaussian kernel: width and step must be positive");
    const auto half = static_cast<std::ptrdiff_t>(std::ceil(6.0 * width / step));
    std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (std::ptrdiff_t i = -half; i <= half; ++i) {
        const double x = static_cast<double>(i) * step / width;
        k[static_cast<std::size_t>(i + half)] = std::exp(-0.5 * x * x);
        sum += k[static_cast<std::size_t>(i + half)];
    }
    for (double& v : k)
        v /= sum;
    return k;
}

std::vector<double> convolve(std::span<const double> signal, std::span<const double> kernel) {
    const auto n = static_cast<std::ptrdiff_t>(signal.size());
    const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    std::vector<double> out(signal.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t m = -half; m <= half; ++m) {
            const std::ptrdiff_t j = i - m;
            if (j >= 0 && j < n)
                acc += kernel[static_cast<std::size_t>(m + half)] * signal[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

SpectrumResult bin_and_broaden(std::span<const Stick> sticks, const SpectrumAxis& axis, double broadening) {
    SpectrumResult out;
    out.axis = axis.points();
    out.broadening = broadening;
    const std::size_t n = out.axis.size();
    out.c_abs.assign(n, 0.0);
    out.loss.assign(n, 0.0);
    // Each stick is shared linearly between its two neighbouring axis points,
    // which keeps its first moment and avoids rounding jitter.
    for (const Stick& s : sticks) {
        const double pos = (s.energy - axis.min) / axis.step;
        const double lower = std::floor(pos);
        const double frac = pos - lower;
        const auto i0 = static_cast<std::ptrdiff_t>(lower);
        for (const auto& [idx, w] : {std::pair{i0, 1.0 - frac}, std::pair{i0 + 1, frac}}) {
            if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n) || w == 0.0)
                continue;
            out.c_abs[static_cast<std::size_t>(idx)] += w * s.c_abs;
            out.loss[static_cast<std::size_t>(idx)] += w * s.c_abs * s.loss_fraction;
        }
    }
    const auto kernel = gaussian_kernel(broadening, axis.step);
    out.broadened = convolve(out.loss, kernel);
    out.lines = find_lines(out.axis, out.broadened, broadening);
    return out;
}

std::vector<std::size_t> local_maxima(std::span<const double> s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] > s[i - 1] && s[i] >= s[i + 1])
            out.push_back(i);
    }
    return out;
}

double weighted_centroid(std::span<const double> axis, std::span<const double> signal, double centre,
                         double half_window) {
    double num = 0.0;
    double den = 0.0;
    const double reach = half_window * (1.0 + 1e-9);  // keep grid points sitting on the edge
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (std::abs(axis[i] - centre) <= reach) {
            num += axis[i] * signal[i];
            den += signal[i];
        }
    }
    return den > 0.0 ? num / den : centre;
}

std::vector<LineFeature> find_lines(std::span<const double> axis, std::span<const double> signal,
                                    double broadening) {
    std::vector<LineFeature> out;
    for (std::size_t i : local_maxima(signal)) {
        out.push_back({axis[i], weighted_centroid(axis, signal, axis[i], 2.0 * broadening), signal[i]});
    }
    return out;
}

}  // namespace dimeron
