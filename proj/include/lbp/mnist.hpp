#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lbp {

// IDX image file (big-endian magic 0x00000803), binarized at threshold 0.5
// after scaling pixels to [0,1]. Each row is one image.
std::vector<std::vector<std::uint8_t>> load_mnist_idx(const std::string& path);

// IDX label file (big-endian magic 0x00000801).
std::vector<std::uint8_t> load_mnist_labels(const std::string& path);

}  // namespace lbp
