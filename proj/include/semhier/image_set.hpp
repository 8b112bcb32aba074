#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace semhier {

// Fixed-universe bitset over image indices [0, size).
class ImageSet {
public:
    ImageSet() = default;
    explicit ImageSet(std::size_t universe) : size_(universe), words_((universe + 63) / 64, 0) {}

    std::size_t universe() const { return size_; }

    void insert(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool contains(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    std::size_t intersection_count(const ImageSet& other) const {
        std::size_t n = 0;
        for (std::size_t k = 0; k < words_.size(); ++k) {
            n += static_cast<std::size_t>(std::popcount(words_[k] & other.words_[k]));
        }
        return n;
    }

    ImageSet& operator|=(const ImageSet& other) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
        return *this;
    }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < size_; ++i) {
            if (contains(i)) out.push_back(i);
        }
        return out;
    }

    bool operator==(const ImageSet&) const = default;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace semhier
