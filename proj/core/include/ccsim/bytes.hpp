#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccsim {

using Bytes = std::vector<uint8_t>;

// Canonical byte layout shared by hashing, signing and on-disk views:
// fixed-width little-endian integers, u32 length prefixes for lists and
// variable byte strings, raw 32-byte blocks for ids and digests.
// See docs/serialization.md for the full field-by-field layout.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }

    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void raw(std::span<const uint8_t> bytes) {
        buf_.insert(buf_.end(), bytes.begin(), bytes.end());
    }

    void fixed32(const std::array<uint8_t, 32>& a) { raw(a); }

    void var_bytes(std::span<const uint8_t> bytes) {
        u32(static_cast<uint32_t>(bytes.size()));
        raw(bytes);
    }

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }
    size_t size() const { return buf_.size(); }

private:
    Bytes buf_;
};

struct DeserializeError : std::runtime_error {
    explicit DeserializeError(const std::string& what) : std::runtime_error(what) {}
};

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    std::array<uint8_t, 32> fixed32() {
        need(32);
        std::array<uint8_t, 32> a{};
        std::memcpy(a.data(), data_.data() + pos_, 32);
        pos_ += 32;
        return a;
    }

    Bytes var_bytes() {
        uint32_t n = u32();
        need(n);
        Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    bool done() const { return pos_ == data_.size(); }
    size_t remaining() const { return data_.size() - pos_; }

    void expect_done() const {
        if (!done()) throw DeserializeError("trailing bytes after value");
    }

private:
    void need(size_t n) const {
        if (data_.size() - pos_ < n) throw DeserializeError("unexpected end of input");
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

std::string to_hex(std::span<const uint8_t> bytes);
Bytes from_hex(const std::string& hex);  // throws DeserializeError on bad input

}  // namespace ccsim
