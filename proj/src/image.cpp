#include "oriole/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace oriole {

Image::Image(int width, int height, double fill) {
    if (width < 1 || height < 1)
        throw DimensionError("Image: width and height must be >= 1");
    if (fill < 0.0 || fill > 1.0)
        throw InputError("Image: fill value outside [0,1]");
    w_ = width;
    h_ = height;
    px_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image Image::from_pixels(int width, int height, std::vector<double> pixels) {
    if (width < 1 || height < 1)
        throw DimensionError("Image: width and height must be >= 1");
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        throw DimensionError("Image: pixel buffer size does not match width*height");
    for (double v : pixels)
        if (!(v >= 0.0 && v <= 1.0))
            throw InputError("Image: pixel value outside [0,1]");
    Image img;
    img.w_ = width;
    img.h_ = height;
    img.px_ = std::move(pixels);
    return img;
}

Image apply_perturbation(const Image& x, const Perturbation& delta) {
    if (!delta.same_shape(x))
        throw DimensionError("apply_perturbation: image and perturbation shapes differ");
    Image out = x;
    double* p = out.pixels().data();
    const double* d = delta.delta.data();
    const int n = x.npixels();
    for (int i = 0; i < n; ++i)
        p[i] = std::clamp(p[i] + d[i], 0.0, 1.0);
    return out;
}

std::vector<unsigned char> pgm_bytes(const Image& img) {
    std::ostringstream header;
    header << "P5\n" << img.width() << " " << img.height() << "\n65535\n";
    std::string h = header.str();
    std::vector<unsigned char> out(h.begin(), h.end());
    out.reserve(out.size() + static_cast<std::size_t>(img.npixels()) * 2);
    for (double v : img.pixels()) {
        auto s = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        out.push_back(static_cast<unsigned char>(s >> 8));  // big-endian
        out.push_back(static_cast<unsigned char>(s & 0xff));
    }
    return out;
}

namespace {

int next_pgm_token(const std::vector<unsigned char>& b, std::size_t& pos) {
    // skips whitespace and # comments, then parses a decimal integer
    while (pos < b.size()) {
        unsigned char c = b[pos];
        if (c == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= b.size() || b[pos] < '0' || b[pos] > '9')
        throw InputError("PGM: malformed header");
    long value = 0;
    while (pos < b.size() && b[pos] >= '0' && b[pos] <= '9') {
        value = value * 10 + (b[pos] - '0');
        if (value > 1 << 30) throw InputError("PGM: header value out of range");
        ++pos;
    }
    return static_cast<int>(value);
}

}  // namespace

Image image_from_pgm_bytes(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw InputError("PGM: missing P5 magic");
    std::size_t pos = 2;
    int w = next_pgm_token(bytes, pos);
    int h = next_pgm_token(bytes, pos);
    int maxval = next_pgm_token(bytes, pos);
    if (maxval != 65535)
        throw InputError("PGM: expected maxval 65535");
    ++pos;  // single whitespace byte after maxval
    std::size_t need = static_cast<std::size_t>(w) * h * 2;
    if (bytes.size() - pos < need)
        throw InputError("PGM: truncated sample data");
    std::vector<double> px(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < px.size(); ++i) {
        unsigned hi = bytes[pos + 2 * i];
        unsigned lo = bytes[pos + 2 * i + 1];
        px[i] = static_cast<double>((hi << 8) | lo) / 65535.0;
    }
    return Image::from_pixels(w, h, std::move(px));
}

void write_pgm(const Image& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open for writing: " + path);
    auto bytes = pgm_bytes(img);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw InputError("write failed: " + path);
}

Image read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return image_from_pgm_bytes(bytes);
}

}  // namespace oriole
