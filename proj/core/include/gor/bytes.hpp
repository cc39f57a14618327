#ifndef GOR_BYTES_HPP
#define GOR_BYTES_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace gor {

using Bytes = std::vector<uint8_t>;
using Digest = std::array<uint8_t, 32>;

inline Bytes to_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

std::string hex_encode(const uint8_t* data, size_t len);
std::string hex_encode(const Bytes& b);
std::string hex_encode(const Digest& d);
Bytes hex_decode(const std::string& hex);

// Little-endian scalar append/read used by every wire format in the project.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) {
        buf_.push_back(static_cast<uint8_t>(v));
        buf_.push_back(static_cast<uint8_t>(v >> 8));
    }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void raw(const uint8_t* data, size_t len) { buf_.insert(buf_.end(), data, data + len); }
    void raw(const Bytes& b) { raw(b.data(), b.size()); }
    void raw(const Digest& d) { raw(d.data(), d.size()); }
    // u32 length prefix followed by the bytes
    void blob(const Bytes& b) {
        u32(static_cast<uint32_t>(b.size()));
        raw(b);
    }
    // u16 length prefix, for short strings such as node ids
    void str(const std::string& s) {
        if (s.size() > 0xffff) throw std::length_error("string too long for u16 prefix");
        u16(static_cast<uint16_t>(s.size()));
        raw(reinterpret_cast<const uint8_t*>(s.data()), s.size());
    }
    void pad_zero_to(size_t total) {
        if (buf_.size() > total) throw std::length_error("content exceeds pad target");
        buf_.resize(total, 0);
    }
    Bytes take() { return std::move(buf_); }
    size_t size() const { return buf_.size(); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(const Bytes& b) : data_(b.data()), size_(b.size()) {}
    ByteReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

    uint8_t u8() { return take(1)[0]; }
    uint16_t u16() {
        const uint8_t* p = take(2);
        return static_cast<uint16_t>(p[0] | (p[1] << 8));
    }
    uint32_t u32() {
        const uint8_t* p = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        const uint8_t* p = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
        return v;
    }
    Bytes raw(size_t len) {
        const uint8_t* p = take(len);
        return Bytes(p, p + len);
    }
    Digest digest32() {
        const uint8_t* p = take(32);
        Digest d;
        std::memcpy(d.data(), p, 32);
        return d;
    }
    Bytes blob() {
        uint32_t len = u32();
        return raw(len);
    }
    std::string str() {
        uint16_t len = u16();
        const uint8_t* p = take(len);
        return std::string(reinterpret_cast<const char*>(p), len);
    }
    size_t remaining() const { return size_ - pos_; }
    // Trailing zero padding must be all zero bytes.
    void expect_zero_fill() {
        while (pos_ < size_) {
            if (data_[pos_++] != 0) throw std::runtime_error("nonzero padding byte");
        }
    }

private:
    const uint8_t* take(size_t n) {
        if (pos_ + n > size_) throw std::runtime_error("truncated input");
        const uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }
    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

}  // namespace gor

#endif
