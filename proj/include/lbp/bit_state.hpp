#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lbp {

// Binary configuration x in {0,1}^N. Entries are stored as bytes holding
// exactly 0 or 1 so that arithmetic like (1 - 2*x[i]) works directly.
class BitState {
public:
    BitState() = default;
    explicit BitState(int n, int fill = 0) : bits_(static_cast<std::size_t>(n), check_bit(fill)) {}

    static BitState from_bits(const std::vector<int>& raw) {
        BitState s(static_cast<int>(raw.size()));
        for (std::size_t i = 0; i < raw.size(); ++i) s.bits_[i] = check_bit(raw[i]);
        return s;
    }

    // State index -> bit vector; bit i of `index` becomes site i.
    static BitState from_index(std::uint64_t index, int n) {
        BitState s(n);
        for (int i = 0; i < n; ++i) s.bits_[static_cast<std::size_t>(i)] = (index >> i) & 1u;
        return s;
    }

    std::uint64_t to_index() const {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            idx |= static_cast<std::uint64_t>(bits_[i]) << i;
        return idx;
    }

    int size() const { return static_cast<int>(bits_.size()); }

    std::uint8_t operator[](int i) const { return bits_[static_cast<std::size_t>(i)]; }

    void set(int i, int value) { bits_[static_cast<std::size_t>(i)] = check_bit(value); }

    void flip(int i) { bits_[static_cast<std::size_t>(i)] ^= 1u; }

    // Spin view used by the Ising model: s = 2x - 1 in {-1,+1}.
    int spin(int i) const { return 2 * static_cast<int>(bits_[static_cast<std::size_t>(i)]) - 1; }

    int hamming_distance(const BitState& other) const {
        int d = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] != other.bits_[i];
        return d;
    }

    bool operator==(const BitState& other) const { return bits_ == other.bits_; }
    bool operator!=(const BitState& other) const { return bits_ != other.bits_; }

    const std::uint8_t* data() const { return bits_.data(); }

private:
    static std::uint8_t check_bit(int v) {
        if (v != 0 && v != 1) throw std::invalid_argument("BitState: entries must be 0 or 1");
        return static_cast<std::uint8_t>(v);
    }

    std::vector<std::uint8_t> bits_;
};

}  // namespace lbp
