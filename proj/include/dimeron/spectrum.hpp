#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dimeron {

/// Uniform probe-detuning axis in rad/μs, inclusive of both ends.
struct SpectrumAxis {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    std::vector<double> points() const;
    std::size_t size() const;
};

/// One eigenstate's contribution: absorption strength and loss fraction.
struct Stick {
    double energy = 0.0;
    double c_abs = 0.0;
    double loss_fraction = 0.0;
};

struct LineFeature {
    double peak = 0.0;       // axis position of the local maximum
    double centroid = 0.0;   // weighted centre within ±2 broadening
    double height = 0.0;
};

struct SpectrumResult {
    std::vector<double> axis;
    std::vector<double> c_abs;       // binned raw absorption
    std::vector<double> loss;        // binned loss-weighted signal S = f C_abs
    std::vector<double> broadened;   // S convolved with the Gaussian kernel
    double broadening = 0.0;         // kernel standard deviation, rad/μs
    std::vector<LineFeature> lines;
};

/// Unit-sum discrete Gaussian kernel with standard deviation `width`,
/// truncated at ±6 widths. Element i corresponds to offset (i - half)·step.
std::vector<double> gaussian_kernel(double width, double step);

/// Discrete convolution with a centred kernel; edges are zero-padded.
std::vector<double> convolve(std::span<const double> signal, std::span<const double> kernel);

/// Bin sticks onto the axis (linear share between the two nearest points),
/// convolve, and locate lines.
SpectrumResult bin_and_broaden(std::span<const Stick> sticks, const SpectrumAxis& axis, double broadening);

/// Indices i with s[i-1] < s[i] >= s[i+1].
std::vector<std::size_t> local_maxima(std::span<const double> signal);

/// Weighted centroid of `signal` within [centre - half_window, centre + half_window].
double weighted_centroid(std::span<const double> axis, std::span<const double> signal, double centre,
                         double half_window);

std::vector<LineFeature> find_lines(std::span<const double> axis, std::span<const double> signal,
                                    double broadening);

}  // namespace dimeron
