#pragma once

#include <string>
#include <vector>

#include "oriole/errors.hpp"

namespace oriole {

/// Single-channel image, row-major, luminance values in [0, 1].
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);

    /// Validating constructor: rejects out-of-range pixels or a size mismatch.
    static Image from_pixels(int width, int height, std::vector<double> pixels);

    int width() const { return w_; }
    int height() const { return h_; }
    int npixels() const { return w_ * h_; }

    double at(int row, int col) const { return px_[static_cast<std::size_t>(row) * w_ + col]; }
    double& at(int row, int col) { return px_[static_cast<std::size_t>(row) * w_ + col]; }

    const std::vector<double>& pixels() const { return px_; }
    std::vector<double>& pixels() { return px_; }

    bool same_shape(const Image& o) const { return w_ == o.w_ && h_ == o.h_; }

    bool operator==(const Image& o) const = default;

private:
    int w_ = 0;
    int h_ = 0;
    std::vector<double> px_;
};

/// Signed per-pixel offsets; same grid shape as the image it perturbs.
struct Perturbation {
    int width = 0;
    int height = 0;
    std::vector<double> delta;  // row-major

    Perturbation() = default;
    Perturbation(int w, int h) : width(w), height(h), delta(static_cast<std::size_t>(w) * h, 0.0) {}

    double at(int row, int col) const { return delta[static_cast<std::size_t>(row) * width + col]; }
    double& at(int row, int col) { return delta[static_cast<std::size_t>(row) * width + col]; }

    bool same_shape(const Image& img) const {
        return width == img.width() && height == img.height();
    }
};

/// x (+) delta: pixel-wise addition followed by clamping to [0, 1].
Image apply_perturbation(const Image& x, const Perturbation& delta);

/// Binary PGM (P5), maxval 65535, big-endian 16-bit samples.
void write_pgm(const Image& img, const std::string& path);
Image read_pgm(const std::string& path);
std::vector<unsigned char> pgm_bytes(const Image& img);
Image image_from_pgm_bytes(const std::vector<unsigned char>& bytes);

}  // namespace oriole
