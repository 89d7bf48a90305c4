#include "lbp/mnist.hpp"

#include <fstream>
#include <stdexcept>

namespace lbp {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;
constexpr std::uint64_t kMaxBytes = 1ull << 32;  // dimension sanity bound

std::uint32_t read_be32(std::istream& is, const char* what) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error(std::string("idx file truncated while reading ") + what);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::ifstream open_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open idx file: " + path);
    return is;
}

}  // namespace

std::vector<std::vector<std::uint8_t>> load_mnist_idx(const std::string& path) {
    std::ifstream is = open_file(path);
    const std::uint32_t magic = read_be32(is, "magic");
    if (magic != kImageMagic)
        throw std::runtime_error("idx file has wrong magic for images (want 0x00000803)");
    const std::uint64_t count = read_be32(is, "image count");
    const std::uint64_t rows = read_be32(is, "row count");
    const std::uint64_t cols = read_be32(is, "column count");
    if (rows == 0 || cols == 0 || count * rows * cols > kMaxBytes)
        throw std::runtime_error("idx file dimensions overflow sanity bounds");

    const std::size_t pixels = static_cast<std::size_t>(rows * cols);
    std::vector<std::vector<std::uint8_t>> images(static_cast<std::size_t>(count));
    std::vector<unsigned char> buf(pixels);
    for (auto& image : images) {
        if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels)))
            throw std::runtime_error("idx file truncated while reading image data");
        image.resize(pixels);
        for (std::size_t i = 0; i < pixels; ++i)
            image[i] = (buf[i] / 255.0 > 0.5) ? 1 : 0;
    }
    return images;
}

std::vector<std::uint8_t> load_mnist_labels(const std::string& path) {
    std::ifstream is = open_file(path);
    const std::uint32_t magic = read_be32(is, "magic");
    if (magic != kLabelMagic)
        throw std::runtime_error("idx file has wrong magic for labels (want 0x00000801)");
    const std::uint64_t count = read_be32(is, "label count");
    if (count > kMaxBytes) throw std::runtime_error("idx file dimensions overflow sanity bounds");
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(count));
    if (!is.read(reinterpret_cast<char*>(labels.data()),
                 static_cast<std::streamsize>(labels.size())))
        throw std::runtime_error("idx file truncated while reading label data");
    return labels;
}

}  // namespace lbp
