#include "drivesim/codec.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <stdexcept>

namespace drivesim {

namespace {

constexpr std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        t[i] = c;
    }
    return t;
}

constexpr auto kCrcTable = make_crc_table();

constexpr std::array<std::uint8_t, 4> kCommandMagic{'F', 'D', '0', '1'};
constexpr std::array<std::uint8_t, 4> kTouchMagic{'T', 'S', '0', '1'};
constexpr std::array<std::uint8_t, 4> kPhoneMagic{'P', 'H', '0', '1'};

class Writer {
public:
    explicit Writer(std::size_t reserve) { out_.reserve(reserve); }

    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void u8(std::uint8_t v) { out_.push_back(v); }
    template <typename T>
    void le(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i)
            out_.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
    }
    void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }

    Bytes take() { return std::move(out_); }
    std::span<const std::uint8_t> view() const { return out_; }

private:
    Bytes out_;
};

template <typename T>
T read_le(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
    return static_cast<T>(v);
}

float read_f32(std::span<const std::uint8_t> b, std::size_t at) {
    return std::bit_cast<float>(read_le<std::uint32_t>(b, at));
}

bool has_magic(std::span<const std::uint8_t> b, const std::array<std::uint8_t, 4>& magic) {
    return std::equal(magic.begin(), magic.end(), b.begin());
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept {
    std::uint32_t c = 0xFFFFFFFFu;
    for (auto byte : data) c = kCrcTable[(c ^ byte) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

const char* to_string(DecodeError e) noexcept {
    switch (e) {
        case DecodeError::BadMagic: return "BadMagic";
        case DecodeError::BadLength: return "BadLength";
        case DecodeError::BadVersion: return "BadVersion";
        case DecodeError::BadCrc: return "BadCrc";
        case DecodeError::BadKind: return "BadKind";
    }
    return "Unknown";
}

Bytes encode_command(const PlatformCommand& cmd) {
    Writer w(kCommandSize);
    w.bytes(kCommandMagic);
    w.u8(kCommandVersion);
    w.u8(cmd.flags.bits());
    w.le(cmd.seq);
    w.le(cmd.t_us);
    w.f32(cmd.pitch);
    w.f32(cmd.roll);
    w.f32(cmd.yaw);
    w.f32(cmd.heave);
    w.le(crc32(w.view()));
    return w.take();
}

Decoded<PlatformCommand> decode_command(std::span<const std::uint8_t> b) {
    if (b.size() != kCommandSize) return DecodeError::BadLength;
    if (!has_magic(b, kCommandMagic)) return DecodeError::BadMagic;
    if (b[4] != kCommandVersion) return DecodeError::BadVersion;
    if (crc32(b.first(34)) != read_le<std::uint32_t>(b, 34)) return DecodeError::BadCrc;

    PlatformCommand cmd;
    cmd.flags = CommandFlags::from_bits(b[5]);
    cmd.seq = read_le<std::uint32_t>(b, 6);
    cmd.t_us = read_le<std::uint64_t>(b, 10);
    cmd.pitch = read_f32(b, 18);
    cmd.roll = read_f32(b, 22);
    cmd.yaw = read_f32(b, 26);
    cmd.heave = read_f32(b, 30);
    return cmd;
}

Bytes encode_touch(std::uint32_t seq, const TouchSample& sample) {
    Writer w(kTouchDatagramSize);
    w.bytes(kTouchMagic);
    w.le(seq);
    w.le(sample.t_us);
    w.u8(sample.mask());
    return w.take();
}

Decoded<TouchDatagram> decode_touch(std::span<const std::uint8_t> b) {
    if (b.size() != kTouchDatagramSize) return DecodeError::BadLength;
    if (!has_magic(b, kTouchMagic)) return DecodeError::BadMagic;
    TouchDatagram d;
    d.seq = read_le<std::uint32_t>(b, 4);
    d.sample.t_us = read_le<std::uint64_t>(b, 8);
    const std::uint8_t mask = b[16];
    for (int i = 0; i < 4; ++i) d.sample.quadrants[i] = (mask >> i) & 1u;
    return d;
}

Bytes encode_phone(std::uint32_t seq, const PhoneEvent& ev) {
    if (ev.question.size() > 0xFFFF) throw std::length_error("phone question longer than 65535 bytes");
    Writer w(kPhoneHeaderSize + ev.question.size());
    w.bytes(kPhoneMagic);
    w.le(seq);
    w.le(ev.t_us);
    w.u8(static_cast<std::uint8_t>(ev.kind));
    w.le(static_cast<std::uint16_t>(ev.question.size()));
    w.bytes({reinterpret_cast<const std::uint8_t*>(ev.question.data()), ev.question.size()});
    return w.take();
}

Decoded<PhoneDatagram> decode_phone(std::span<const std::uint8_t> b) {
    if (b.size() < kPhoneHeaderSize) return DecodeError::BadLength;
    if (!has_magic(b, kPhoneMagic)) return DecodeError::BadMagic;
    const auto len = read_le<std::uint16_t>(b, 17);
    if (b.size() != kPhoneHeaderSize + len) return DecodeError::BadLength;
    if (b[16] > static_cast<std::uint8_t>(PhoneEventKind::Putdown)) return DecodeError::BadKind;
    PhoneDatagram d;
    d.seq = read_le<std::uint32_t>(b, 4);
    d.event.t_us = read_le<std::uint64_t>(b, 8);
    d.event.kind = static_cast<PhoneEventKind>(b[16]);
    d.event.question.assign(reinterpret_cast<const char*>(b.data() + kPhoneHeaderSize), len);
    return d;
}

}  // namespace drivesim
